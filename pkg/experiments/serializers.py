import json
from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from estimator.services import has_m_formula
from graphs.serializers import ModelSpecSerializer
from utils.digest import payload_digest
from utils.exceptions import EmissionError

from .harness import ExperimentConfig


class CycleBudgetField(serializers.Field):
    """
    m is either the string "auto" or an integer >= 3
    """
    default_error_messages = {
        'invalid': 'm must be "auto" or an integer >= 3.',
    }

    def to_internal_value(self, data):
        if data == 'auto':
            return data
        if isinstance(data, bool) or not isinstance(data, int) or data < 3:
            self.fail('invalid')
        return data

    def to_representation(self, value):
        return value


class TolerancesSerializer(serializers.Serializer):
    se_mult = serializers.FloatField(min_value=0.0, required=False)


class GuardsSerializer(serializers.Serializer):
    oracle_max_n = serializers.IntegerField(min_value=0, required=False)
    max_vertices = serializers.IntegerField(min_value=1, required=False)


class ExperimentConfigSerializer(serializers.Serializer):
    """
    Experiment config JSON:
    {model, epsilon, m, replications, master_seed, tolerances, guards, output_dir}
    """
    model = ModelSpecSerializer()
    epsilon = serializers.FloatField()
    m = CycleBudgetField(required=False, default='auto')
    replications = serializers.IntegerField(min_value=1)
    master_seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1)
    tolerances = TolerancesSerializer(required=False)
    guards = GuardsSerializer(required=False)
    record_timing = serializers.BooleanField(required=False, default=False)
    m_sweep = serializers.ListField(
        child=serializers.IntegerField(min_value=3), required=False, default=list
    )
    output_dir = serializers.CharField(required=False, allow_blank=False)

    def validate_epsilon(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("epsilon must lie in (0, 1).")
        return value

    def validate(self, attrs):
        spec = attrs['model']['spec']
        if attrs['m'] == 'auto' and not has_m_formula(spec):
            raise serializers.ValidationError({
                'm': f"Model '{spec.variant.value}' has no m_eps formula; give an integer m."
            })
        return attrs

    def create(self, validated_data):
        archaeology = settings.ARCHAEOLOGY
        guards = settings.ARCHAEOLOGY_GUARDS
        tolerances = validated_data.get('tolerances', {})
        limits = validated_data.get('guards', {})
        return ExperimentConfig(
            model=validated_data['model']['spec'],
            epsilon=validated_data['epsilon'],
            m=validated_data['m'],
            replications=validated_data['replications'],
            master_seed=validated_data['master_seed'],
            se_mult=tolerances.get('se_mult', archaeology['SE_MULT']),
            oracle_max_n=limits.get('oracle_max_n', 0),
            max_vertices=limits.get('max_vertices', guards['MAX_VERTICES']),
            max_steps=guards['MAX_STEPS'],
            record_timing=validated_data['record_timing'],
            m_sweep=tuple(sorted(set(validated_data['m_sweep']))),
            output_dir=validated_data.get('output_dir'),
        )


def load_config(path):
    """Parse and validate an experiment config file into an ExperimentConfig."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except UnicodeDecodeError as exc:
        raise serializers.ValidationError({'config': [f"{path}: not valid UTF-8"]}) from exc
    except OSError as exc:
        raise EmissionError(path, exc.strerror or exc) from exc
    return parse_config(text, source=str(path))


def parse_config(text, source='<config>'):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise serializers.ValidationError(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})")
    if not isinstance(payload, dict):
        raise serializers.ValidationError(f"{source}: config must be a JSON object")
    serializer = ExperimentConfigSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


class ExperimentResultSerializer(serializers.Serializer):
    """
    Summary JSON of a containment run; per-replication rows go to the CSV
    """
    config = serializers.SerializerMethodField()
    config_hash = serializers.SerializerMethodField()
    m = serializers.IntegerField()
    clamped = serializers.BooleanField()
    replications = serializers.IntegerField()
    containment_rate = serializers.FloatField()
    wilson_ci = serializers.ListField(child=serializers.FloatField())
    size_stats = serializers.DictField()
    theoretical_k_log = serializers.FloatField()
    size_bound_rate = serializers.FloatField()
    oracle_checked = serializers.IntegerField()
    oracle_mismatches = serializers.IntegerField()

    def get_config(self, obj):
        return obj.config.to_dict()

    def get_config_hash(self, obj):
        return payload_digest(obj.config.to_dict())


class SweepResultSerializer(serializers.Serializer):
    config = serializers.SerializerMethodField()
    config_hash = serializers.SerializerMethodField()
    m_values = serializers.SerializerMethodField()
    subset_violations = serializers.IntegerField()
    containment_monotone = serializers.BooleanField()
    results = serializers.SerializerMethodField()

    def get_config(self, obj):
        return obj.config.to_dict()

    def get_config_hash(self, obj):
        return payload_digest(obj.config.to_dict())

    def get_m_values(self, obj):
        return sorted(obj.results)

    def get_results(self, obj):
        return {
            str(m): {
                key: value
                for key, value in ExperimentResultSerializer(result).data.items()
                if key not in ('config', 'config_hash')
            }
            for m, result in sorted(obj.results.items())
        }


class DiagnosticReportSerializer(serializers.Serializer):
    check = serializers.CharField()
    sample_size = serializers.IntegerField()
    statistic = serializers.FloatField()
    target = serializers.ListField(child=serializers.FloatField())
    standard_error = serializers.FloatField()
    se_mult = serializers.FloatField()
    passed = serializers.BooleanField()
    parameters = serializers.DictField()
    details = serializers.DictField()


class BaselineSerializer(serializers.Serializer):
    """A pinned-seed containment baseline: a pilot measurement or a stated floor."""
    SOURCES = ('pilot', 'floor')

    source = serializers.ChoiceField(choices=SOURCES)
    m = serializers.IntegerField(min_value=3)
    containment_rate = serializers.FloatField(min_value=0.0, max_value=1.0)
    replications = serializers.IntegerField(min_value=1)
    config_hash = serializers.CharField(required=False, allow_blank=True, default='')
    wilson_ci = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=1.0),
        min_length=2,
        max_length=2,
        required=False,
    )

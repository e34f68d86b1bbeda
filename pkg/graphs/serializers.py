from rest_framework import serializers

from utils.exceptions import ModelSpecError

from .generators import ModelSpec, ModelVariant


class ModelSpecSerializer(serializers.Serializer):
    """
    Model block of the experiment config: {variant, n|T, l|c|alpha}
    """
    variant = serializers.ChoiceField(choices=[variant.value for variant in ModelVariant])
    n = serializers.IntegerField(min_value=1, required=False)
    T = serializers.IntegerField(min_value=1, required=False)
    l = serializers.IntegerField(min_value=1, required=False)  # noqa: E741
    c = serializers.FloatField(required=False)
    alpha = serializers.FloatField(required=False)

    REQUIRED = {
        ModelVariant.URRT: ('n',),
        ModelVariant.LDAG: ('n', 'l'),
        ModelVariant.COOPER_FRIEZE: ('n', 'c'),
        ModelVariant.CF_PROCESS: ('T', 'alpha'),
        ModelVariant.INHOM_ER: ('n', 'c'),
    }

    KWARGS = {'n': 'n', 'T': 'steps', 'l': 'ell', 'c': 'c', 'alpha': 'alpha'}

    def validate(self, attrs):
        """Check every parameter the variant needs is present and in range"""
        variant = ModelVariant(attrs['variant'])
        missing = [field for field in self.REQUIRED[variant] if attrs.get(field) is None]
        if missing:
            raise serializers.ValidationError(
                f"Model '{variant.value}' requires: {', '.join(missing)}"
            )
        params = {self.KWARGS[field]: attrs[field] for field in self.REQUIRED[variant]}
        try:
            attrs['spec'] = ModelSpec(variant, **params)
        except ModelSpecError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def to_representation(self, instance):
        return instance.to_dict()

from rest_framework import serializers

from anchors.serializers import DoubleCycleWitnessSerializer


class ConfidenceSetSerializer(serializers.Serializer):
    """
    Confidence set JSON: {epsilon, m_used, clamped, members, theoretical_k_log, model}
    """
    epsilon = serializers.FloatField()
    m_used = serializers.IntegerField()
    clamped = serializers.BooleanField()
    epsilon_in_guaranteed_range = serializers.BooleanField()
    members = serializers.ListField(child=serializers.IntegerField())
    theoretical_k_log = serializers.FloatField()
    model = serializers.SerializerMethodField()
    witnesses = serializers.SerializerMethodField()

    def get_model(self, obj):
        return obj.model.to_dict()

    def get_witnesses(self, obj):
        return {
            str(v): DoubleCycleWitnessSerializer(witness).data
            for v, witness in sorted(obj.witnesses.items())
        }

    def to_representation(self, instance):
        data = super().to_representation(instance)
        if not instance.witnesses:
            data.pop('witnesses')
        return data

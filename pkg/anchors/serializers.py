from rest_framework import serializers


class DoubleCycleWitnessSerializer(serializers.Serializer):
    """
    Witness JSON: {anchors, s, t, p, cycle_a, cycle_b, shared_path}, 1-indexed
    """
    anchors = serializers.ListField(child=serializers.IntegerField(min_value=1))
    s = serializers.IntegerField(min_value=3)
    t = serializers.IntegerField(min_value=3)
    p = serializers.IntegerField(min_value=1)
    cycle_a = serializers.ListField(child=serializers.IntegerField(min_value=1))
    cycle_b = serializers.ListField(child=serializers.IntegerField(min_value=1))
    shared_path = serializers.ListField(child=serializers.IntegerField(min_value=1))


class AnchorSetSerializer(serializers.Serializer):
    """
    Anchor set JSON: {m, anchors: [...]} plus witnesses keyed by vertex when attached
    """
    m = serializers.IntegerField()
    anchors = serializers.ListField(source='members', child=serializers.IntegerField())
    witnesses = serializers.SerializerMethodField()

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

from rest_framework import serializers

from .attacks import AttackKind


class NodeSerializer(serializers.Serializer):
    id = serializers.IntegerField(min_value=0)
    p = serializers.FloatField(default=0.0)


class EdgeSerializer(serializers.Serializer):
    id = serializers.IntegerField(min_value=0)
    u = serializers.IntegerField(min_value=0)
    v = serializers.IntegerField(min_value=0)
    x = serializers.FloatField()

    def validate_x(self, value):
        if not value > 0:
            raise serializers.ValidationError("Reactance must be positive")
        return value


class GridSerializer(serializers.Serializer):
    """
    Serializer for the grid document {"nodes", "edges", "reference"}
    """
    nodes = NodeSerializer(many=True, allow_empty=False)
    edges = EdgeSerializer(many=True)
    reference = serializers.IntegerField(min_value=0, required=False, allow_null=True)


class ScenarioSerializer(serializers.Serializer):
    """
    Serializer for an attack scenario; a missing or null param selects the default
    sigma / perturbation scale
    """
    H = serializers.ListField(child=serializers.IntegerField(min_value=0))
    F = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)
    kind = serializers.ChoiceField(choices=[kind.value for kind in AttackKind])
    param = serializers.FloatField(required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_param(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError("Attack parameter must be positive")
        return value


class ObservationSerializer(serializers.Serializer):
    nodes = serializers.ListField(child=serializers.IntegerField(min_value=0))
    theta = serializers.ListField(child=serializers.FloatField())
    theta_obs = serializers.ListField(child=serializers.FloatField())
    p = serializers.ListField(child=serializers.FloatField(), required=False)

    def validate(self, attrs):
        size = len(attrs['nodes'])
        if len(attrs['theta']) != size or len(attrs['theta_obs']) != size:
            raise serializers.ValidationError("nodes, theta and theta_obs must have the same length")
        return attrs


class PowerflowRequestSerializer(serializers.Serializer):
    grid = serializers.DictField()


class AttackRequestSerializer(serializers.Serializer):
    grid = serializers.DictField()
    scenario = ScenarioSerializer()


class DetectRequestSerializer(serializers.Serializer):
    grid = serializers.DictField()
    observation = ObservationSerializer()
    T = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=0)


class WeightProbabilitySerializer(serializers.Serializer):
    m = serializers.IntegerField(min_value=2)
    k = serializers.IntegerField(min_value=1)

    def validate(self, attrs):
        if attrs['k'] > attrs['m'] - 1:
            raise serializers.ValidationError("k must not exceed m - 1")
        return attrs


class SyntheticGridSpecSerializer(serializers.Serializer):
    nodes = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0, default=0)
    mean_degree = serializers.FloatField(min_value=2.0, default=2.6)


class SyntheticAreaSpecSerializer(serializers.Serializer):
    nodes = serializers.IntegerField(min_value=1)
    edges = serializers.IntegerField(min_value=0)
    seed = serializers.IntegerField(min_value=0, default=0)


class GadgetSpecSerializer(serializers.Serializer):
    s = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    B = serializers.IntegerField(min_value=1)
    with_dummies = serializers.BooleanField(default=False)


class ExperimentConfigSerializer(serializers.Serializer):
    """
    Serializer for experiment configs. `grid` is a path or {"synthetic": {...}};
    `area` is a node list, {"synthetic": {...}} or {"gadget": {...}} (the gadget
    brings its own grid)
    """
    grid = serializers.JSONField(required=False, allow_null=True, default=None)
    area = serializers.JSONField()
    failure_sizes = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    samples = serializers.IntegerField(min_value=1)
    kinds = serializers.ListField(
        child=serializers.ChoiceField(choices=[kind.value for kind in AttackKind]),
        default=lambda: [kind.value for kind in AttackKind],
    )
    sigma = serializers.FloatField(required=False, allow_null=True, default=None)
    perturbation = serializers.FloatField(required=False, allow_null=True, default=None)
    T = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    seed = serializers.IntegerField(min_value=0, default=0)
    jobs = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    def validate_grid(self, value):
        if value is None or isinstance(value, str):
            return value
        if isinstance(value, dict) and set(value) == {'synthetic'}:
            spec = SyntheticGridSpecSerializer(data=value['synthetic'])
            spec.is_valid(raise_exception=True)
            return {'synthetic': dict(spec.validated_data)}
        raise serializers.ValidationError('Expected a file path or {"synthetic": {...}}')

    def validate_area(self, value):
        if isinstance(value, list):
            if not value or not all(isinstance(i, int) and i >= 0 for i in value):
                raise serializers.ValidationError("Area must be a non-empty list of node ids")
            return value
        if isinstance(value, dict) and len(value) == 1:
            (key, spec), = value.items()
            nested = {'synthetic': SyntheticAreaSpecSerializer, 'gadget': GadgetSpecSerializer}.get(key)
            if nested is not None:
                spec = nested(data=spec)
                spec.is_valid(raise_exception=True)
                return {key: dict(spec.validated_data)}
        raise serializers.ValidationError('Expected a node list, {"synthetic": {...}} or {"gadget": {...}}')

    def validate(self, attrs):
        for name in ('sigma', 'perturbation'):
            if attrs.get(name) is not None and not attrs[name] > 0:
                raise serializers.ValidationError({name: "Must be positive"})
        if attrs.get('grid') is None and not (isinstance(attrs['area'], dict) and 'gadget' in attrs['area']):
            raise serializers.ValidationError({'grid': "A grid is required unless the area is a gadget"})
        return attrs

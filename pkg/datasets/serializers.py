# datasets/serializers.py
from rest_framework import serializers

from datasets.domain import CategoryLabel
from keyroom.domain import CANONICAL_SUBGOALS, Action, SubgoalEvent


class CoordField(serializers.ListField):
    child = serializers.IntegerField()

    def __init__(self, **kwargs):
        kwargs.setdefault("min_length", 2)
        kwargs.setdefault("max_length", 2)
        super().__init__(**kwargs)


class LayoutRecordSerializer(serializers.Serializer):
    width = serializers.IntegerField(min_value=1, max_value=79)
    height = serializers.IntegerField(min_value=1, max_value=21)
    rows = serializers.ListField(child=serializers.CharField(allow_blank=True, trim_whitespace=False))
    door_pos = CoordField(allow_null=True)
    key_spawn = CoordField(allow_null=True)
    goal_pos = CoordField(allow_null=True)
    agent_spawn = CoordField()

    def validate(self, data):
        if len(data["rows"]) != data["height"]:
            raise serializers.ValidationError(f"expected {data['height']} rows, got {len(data['rows'])}")
        return data


class StateRecordSerializer(serializers.Serializer):
    agent_pos = CoordField()
    key_on_floor = CoordField(allow_null=True)
    key_held = serializers.BooleanField()
    door_locked = serializers.BooleanField()
    last_message = serializers.CharField(allow_blank=True, trim_whitespace=False)
    step_count = serializers.IntegerField(min_value=0)
    terminated = serializers.BooleanField()


class TransitionRecordSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["transition"])
    id = serializers.CharField(min_length=20, max_length=20)
    category = serializers.ChoiceField(choices=[int(c) for c in CategoryLabel])
    event = serializers.ChoiceField(choices=[e.value for e in SubgoalEvent])
    action = serializers.ChoiceField(choices=[int(a) for a in Action])
    task_reward = serializers.IntegerField(min_value=0, max_value=1)
    assisted = serializers.BooleanField(required=False, default=False)
    layout = LayoutRecordSerializer()
    before = StateRecordSerializer()
    after = StateRecordSerializer()

    def validate(self, data):
        if CategoryLabel(data["category"]).event.value != data["event"]:
            raise serializers.ValidationError("category and event disagree")
        return data


class ManifestHeaderSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=["manifest"])
    schema_version = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField()
    size = serializers.IntegerField(min_value=0)
    counts = serializers.DictField(child=serializers.IntegerField(min_value=0))
    created_at = serializers.CharField()
    generator_version = serializers.CharField()
    layout_policy = serializers.CharField()
    assisted_rollouts = serializers.IntegerField(min_value=0, required=False, default=0)
    step_cap = serializers.IntegerField(min_value=0)
    checksum = serializers.RegexField(r"^[0-9a-f]{64}$")

    def validate_counts(self, value):
        expected = {category.key for category in CategoryLabel}
        if set(value) != expected:
            raise serializers.ValidationError(f"expected counts for {sorted(expected)}")
        return value


class ReferenceRecordSerializer(serializers.Serializer):
    transition_id = serializers.CharField()
    flags = serializers.DictField(child=serializers.BooleanField())
    annotator_id = serializers.CharField()
    note = serializers.CharField(allow_blank=True, trim_whitespace=False, required=False, default="")
    flagged = serializers.BooleanField(required=False, default=False)

    def validate_flags(self, value):
        if set(value) != set(CANONICAL_SUBGOALS):
            raise serializers.ValidationError(f"flags must cover exactly {list(CANONICAL_SUBGOALS)}")
        return value

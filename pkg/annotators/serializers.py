# annotators/serializers.py
from rest_framework import serializers

from annotators.domain import ParseStatus
from keyroom.domain import CANONICAL_SUBGOALS


class VerdictRecordSerializer(serializers.Serializer):
    """One line of a verdicts.jsonl file."""
    prompt_id = serializers.CharField()
    transition_id = serializers.CharField()
    config_name = serializers.CharField()
    backend = serializers.CharField()
    raw_text = serializers.CharField(allow_blank=True, trim_whitespace=False)
    flags = serializers.DictField(child=serializers.BooleanField())
    matched = serializers.DictField(child=serializers.BooleanField())
    parse_status = serializers.ChoiceField(choices=[status.value for status in ParseStatus])
    latency_ms = serializers.FloatField(required=False, default=0.0)

    def validate_matched(self, value):
        unknown = set(value) - set(CANONICAL_SUBGOALS)
        if unknown:
            raise serializers.ValidationError(f"not canonical subgoals: {sorted(unknown)}")
        return value

    def validate(self, data):
        if data["parse_status"] == ParseStatus.UNPARSEABLE.value and data["flags"]:
            raise serializers.ValidationError("unparseable verdicts cannot carry flags")
        return data

from dataclasses import dataclass

from keyroom.domain import SubgoalEvent


@dataclass(frozen=True)
class LexiconRule:
    """Matches a lowercase subgoal name containing ``anchor`` and, if given, one of ``any_of``."""
    anchor: str
    any_of: tuple = ()

    def matches(self, name: str) -> bool:
        if self.anchor not in name:
            return False
        return not self.any_of or any(word in name for word in self.any_of)


@dataclass(frozen=True)
class CanonicalLexicon:
    rules: tuple  # ((canonical name, (LexiconRule, ...)), ...)

    @property
    def canonical_names(self) -> tuple:
        return tuple(name for name, _ in self.rules)

    @classmethod
    def from_dict(cls, data: dict) -> "CanonicalLexicon":
        """``{"pick up the key": [["key", ["pick", "get"]], ["key pickup", []]], ...}``"""
        return cls(rules=tuple(
            (canonical, tuple(LexiconRule(anchor, tuple(words)) for anchor, words in entries))
            for canonical, entries in data.items()
        ))


DEFAULT_LEXICON = CanonicalLexicon(rules=(
    (SubgoalEvent.KEY_PICKED_UP.canonical_name, (
        LexiconRule("key", ("pick", "collect", "get", "grab")),
        LexiconRule("key pickup"),
    )),
    (SubgoalEvent.DOOR_UNLOCKED.canonical_name, (
        LexiconRule("door", ("unlock", "open")),
        LexiconRule("unlock"),
    )),
))


def match_canonical(flags: dict, lexicon: CanonicalLexicon = DEFAULT_LEXICON) -> dict:
    """A canonical subgoal is true iff some reported subgoal matching its rules is true."""
    matched = {name: False for name in lexicon.canonical_names}
    for reported, value in flags.items():
        if value is not True:
            continue
        lowered = reported.lower()
        for canonical, rules in lexicon.rules:
            if any(rule.matches(lowered) for rule in rules):
                matched[canonical] = True
    return matched

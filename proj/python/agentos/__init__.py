"""Python access to the agent runtime core."""

import json

from . import _agentos
from ._agentos import SCALE, AgentOSError, Ledger, cosine, embed, majority_vote, normalize_answer, redact_secrets, trust_score

__all__ = [
    "SCALE",
    "Agent",
    "AgentOSError",
    "Ledger",
    "cosine",
    "embed",
    "error_code",
    "majority_vote",
    "normalize_answer",
    "redact_secrets",
    "redacted_character",
    "run_basic_suite",
    "trust_score",
    "validate_character",
]


def error_code(exc):
    """The ErrorCode name carried by an AgentOSError."""
    return exc.args[1] if len(exc.args) > 1 else None


def validate_character(doc):
    return json.loads(_agentos.validate_character(json.dumps(doc)))


def redacted_character(doc):
    return json.loads(_agentos.redacted_character(json.dumps(doc)))


def run_basic_suite(character, script, genesis, fixtures):
    return json.loads(_agentos.run_basic_suite(str(character), str(script), str(genesis), str(fixtures)))


class Agent:
    """A frozen runtime driven by a scripted model."""

    def __init__(self, character, script, settings=None, genesis=None, fixtures=None, clock_start_ms=-1):
        self._impl = _agentos._Agent(
            json.dumps(character),
            json.dumps(script),
            dict(settings or {}),
            json.dumps(genesis) if genesis is not None else "",
            json.dumps(fixtures) if fixtures is not None else "",
            clock_start_ms,
        )

    @property
    def agent_id(self):
        return self._impl.agent_id

    def send(self, text, user_id="py-user", room_id="py-room"):
        return json.loads(self._impl.send(user_id, room_id, text))

    def memories(self, room_id, count=50):
        return json.loads(self._impl.memories(room_id, count))

    def balances(self):
        return json.loads(self._impl.balances())

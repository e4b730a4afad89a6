"""
File: provider_service.py
Heuristic providers. Each one turns a planning task into reasoning output:
relevant action predicates, relevant objects and a heuristic path.

  oracle    exact optimal path from the oracle search
  mock      oracle path with controlled omissions and injected wrong actions
  llm       live language model with grammar checking and blacklist retries
  scripted  canned answers, switched when feedback names a trigger predicate
"""

import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

import config
from domain_model import Domain, PlanningProblem
from grammar_checker import Violation, grammar_check
from llm_service import DEFAULT_MODEL, LLMService
from oracle_service import DEFAULT_MAX_STATES, oracle_heuristic
from reasoning_parser import MissingSection, ProviderError, ReasoningResult, build_prompt, parse_reasoning
from templates import DEFAULT_DEMOS, Demonstration

if TYPE_CHECKING:
    from feedback_service import FeedbackPayload

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class ProviderKind(str, Enum):
    ORACLE = "oracle"
    MOCK = "mock"
    LLM = "llm"


class RetriesExhausted(ProviderError):
    def __init__(self, attempts: int, violations: Sequence[Violation], blacklist: Sequence[str]):
        self.attempts = attempts
        self.violations = list(violations)
        self.blacklist = list(blacklist)
        super().__init__(
            f"Reasoning still invalid after {attempts} attempts: "
            + "; ".join(str(v) for v in self.violations[:5])
        )


class ProviderConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ProviderKind = ProviderKind.ORACLE
    endpoint: Optional[str] = None
    model: str = DEFAULT_MODEL
    api_key: Optional[str] = None
    temperature: float = 0.0
    cache_dir: Optional[str] = None
    replay_only: bool = False
    correct_rate: float = 1.0
    error_rate: float = 0.0
    seed: int = 0
    max_retries: int = 3
    demos: Tuple[Demonstration, ...] = DEFAULT_DEMOS
    oracle_max_states: int = DEFAULT_MAX_STATES

    @field_validator("correct_rate", "error_rate")
    @classmethod
    def check_rate(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {v}")
        return v

    @field_validator("max_retries")
    @classmethod
    def check_retries(cls, v: int) -> int:
        if v < 0:
            raise ValueError("max_retries must be >= 0")
        return v

    @model_validator(mode="after")
    def check_live(self) -> "ProviderConfig":
        if self.kind == ProviderKind.LLM and not self.replay_only and not self.api_key:
            raise ValueError("the llm provider needs an API key (HBTP_LLM_KEY) or replay_only with a cache")
        if self.replay_only and not self.cache_dir:
            raise ValueError("replay_only needs cache_dir")
        return self

    @classmethod
    def from_env(cls, kind: ProviderKind = ProviderKind.ORACLE, **overrides) -> "ProviderConfig":
        values = {
            "kind": kind,
            "endpoint": config.LLM_ENDPOINT,
            "model": config.LLM_MODEL,
            "api_key": config.LLM_KEY,
            "cache_dir": config.LLM_CACHE,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def perturb_path(
    p_star: Sequence[str],
    correct_rate: float,
    error_rate: float,
    seed: int,
    candidates: Sequence[str],
) -> List[str]:
    """
    Keeps round(correct_rate * |p*|) optimal actions (a seeded random subset,
    order preserved), then inserts wrong actions drawn from candidates at
    random positions so that injected / total comes out at error_rate.
    """
    rng = random.Random(seed)
    n = len(p_star)
    keep_count = _round_half_up(correct_rate * n)
    kept_positions = sorted(rng.sample(range(n), keep_count))
    result = [p_star[i] for i in kept_positions]

    optimal = set(p_star)
    pool = sorted(set(candidates) - optimal)
    if error_rate >= 1.0:
        result, inject_count = [], n
    else:
        inject_count = _round_half_up(error_rate * len(result) / (1.0 - error_rate))
    if not pool:
        return result
    for _ in range(inject_count):
        result.insert(rng.randint(0, len(result)), rng.choice(pool))
    return result


class ReasoningProvider:
    name = "provider"

    def reason(
        self,
        problem: PlanningProblem,
        feedback: Optional["FeedbackPayload"] = None,
        round_index: int = 0,
    ) -> ReasoningResult:
        raise NotImplementedError


class OracleProvider(ReasoningProvider):
    name = "oracle"

    def __init__(self, max_states: int = DEFAULT_MAX_STATES):
        self.max_states = max_states

    def reason(self, problem, feedback=None, round_index=0) -> ReasoningResult:
        return oracle_heuristic(problem, max_states=self.max_states)


def _wrong_action_pool(domain: Domain, p_star: Sequence[str]) -> List[str]:
    """
    Actions over the objects the optimal path already touches, so injected
    errors stay inside the space a pruned answer would span. Falls back to the
    whole domain when that leaves nothing non-optimal to inject.
    """
    objects = {o for name in p_star for o in domain.action_by_name[name].args}
    optimal = set(p_star)
    nearby = [a.name for a in domain.actions if a.name not in optimal and set(a.args) <= objects]
    if nearby:
        return nearby
    logger.debug(f"No wrong actions over {sorted(objects)}; drawing from all of {domain.name}")
    return [a.name for a in domain.actions]


class MockProvider(ReasoningProvider):
    """Perturbed oracle output; each feedback round draws a fresh perturbation."""
    name = "mock"

    def __init__(self, correct_rate: float, error_rate: float, seed: int = 0, max_states: int = DEFAULT_MAX_STATES):
        self.correct_rate = correct_rate
        self.error_rate = error_rate
        self.seed = seed
        self.max_states = max_states

    def reason(self, problem, feedback=None, round_index=0) -> ReasoningResult:
        exact = oracle_heuristic(problem, max_states=self.max_states)
        path = perturb_path(
            exact.path,
            self.correct_rate,
            self.error_rate,
            self.seed + round_index,
            _wrong_action_pool(problem.domain, exact.path),
        )
        actions = [problem.domain.action_by_name[name] for name in path]
        return ReasoningResult.from_actions(actions)


class LiveLLMProvider(ReasoningProvider):
    name = "llm"

    def __init__(
        self,
        service: LLMService,
        max_retries: int = 3,
        demos: Sequence[Demonstration] = DEFAULT_DEMOS,
    ):
        self.service = service
        self.max_retries = max_retries
        self.demos = tuple(demos)

    def reason(self, problem, feedback=None, round_index=0, blacklist: Sequence[str] = ()) -> ReasoningResult:
        """One initial query plus up to max_retries re-queries with a growing blacklist."""
        domain = problem.domain
        blacklist = list(blacklist)
        feedback_text = feedback.render() if feedback is not None else None
        violations: List[Violation] = []

        for attempt in range(1, self.max_retries + 2):
            prompt = build_prompt(domain, problem.s0, problem.goal, self.demos, blacklist, feedback_text)
            text = self.service.complete(prompt)
            # answers are checked against the domain before anyone plans with them
            try:
                result = parse_reasoning(text, domain)
                violations = grammar_check(result, domain)
            except MissingSection as e:
                violations = [Violation("format", e.name, str(e))]
            if not violations:
                logger.info(f"LLM reasoning for {problem.label} accepted on attempt {attempt}")
                return result
            for v in violations:
                blacklist.append(f"attempt {attempt}: {v}")
            logger.warning(f"Attempt {attempt} for {problem.label} rejected with {len(violations)} violations")

        raise RetriesExhausted(self.max_retries + 1, violations, blacklist)


@dataclass
class ScriptedProvider(ReasoningProvider):
    """
    Returns initial until a feedback payload lists trigger among the missing
    action predicates, then returns revised.
    """
    initial: ReasoningResult
    revised: Optional[ReasoningResult] = None
    trigger: Optional[str] = None
    calls: List[int] = field(default_factory=list)
    name = "scripted"

    def reason(self, problem, feedback=None, round_index=0) -> ReasoningResult:
        self.calls.append(round_index)
        if (
            self.revised is not None
            and feedback is not None
            and (self.trigger is None or self.trigger in feedback.missing_predicates)
        ):
            return self.revised
        return self.initial


def make_provider(settings: ProviderConfig, service: Optional[LLMService] = None) -> ReasoningProvider:
    if settings.kind == ProviderKind.ORACLE:
        return OracleProvider(settings.oracle_max_states)
    if settings.kind == ProviderKind.MOCK:
        return MockProvider(settings.correct_rate, settings.error_rate, settings.seed, settings.oracle_max_states)
    # a shared service keeps one cache across providers
    if service is None:
        service = LLMService(
            api_key=settings.api_key,
            endpoint=settings.endpoint,
            model=settings.model,
            temperature=settings.temperature,
            cache_dir=settings.cache_dir,
            replay_only=settings.replay_only,
        )
    return LiveLLMProvider(service, settings.max_retries, settings.demos)


def query(
    settings: ProviderConfig,
    problem: PlanningProblem,
    feedback: Optional["FeedbackPayload"] = None,
    round_index: int = 0,
    service: Optional[LLMService] = None,
) -> ReasoningResult:
    """One-shot reasoning query with a provider built from settings."""
    return make_provider(settings, service).reason(problem, feedback, round_index)

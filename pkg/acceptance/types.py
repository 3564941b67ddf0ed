from typing import Any, Dict, Literal, Optional, Protocol
import re

from pydantic import (
    BaseModel,
    NonNegativeInt,
    PositiveInt,
    confloat,
    root_validator,
)
import pydantic


__all__ = (
    'ValidatorSpec',
    'Problem',
    'TrialOutcome',
    'Teacher',
    'Executor',
    'AcceptanceConfig',
    'AcceptanceRateBound',
    'AcceptanceCertificate',
    'CorpusRecord',
)


BOXED_RE = re.compile(r'\\boxed\{([^{}]*)\}')


class ValidatorSpec(BaseModel):
    """How a core output is judged correct for a problem.

    - ``boxed``: the last ``\\boxed{…}`` expression equals ``expected``
    - ``contains``: ``expected`` occurs in the output
    - ``regex``: ``expected`` is a pattern that matches somewhere
    - ``exact``: the stripped output equals ``expected``
    """

    kind: Literal['boxed', 'contains', 'regex', 'exact'] = 'contains'

    expected: str

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _pattern_compiles(cls, values):
        if values['kind'] == 'regex':
            try:
                re.compile(values['expected'])
            except re.error as err:
                raise ValueError(f"invalid pattern: {err}")
        return values

    def check(self, output: str) -> bool:
        if self.kind == 'boxed':
            found = BOXED_RE.findall(output)
            return bool(found) and found[-1].strip() == self.expected.strip()
        elif self.kind == 'contains':
            return self.expected in output
        elif self.kind == 'regex':
            return re.search(self.expected, output) is not None
        else:
            return output.strip() == self.expected.strip()


class Problem(BaseModel):
    """A task instance, read one per record from a problem file."""

    id: str

    text: str

    validator: Optional[ValidatorSpec] = None
    """Needed when a model endpoint executes the problem;
    scripted executors decide success themselves."""

    domain: Literal['math', 'code'] = 'math'
    """Selects the guided-evaluation prompt."""

    class Config:
        allow_mutation = False

    # The `validator` field shadows the decorator in the class body.
    @pydantic.validator('id')
    def _non_empty_id(cls, v):
        if not v.strip():
            raise ValueError("problem ID must not be blank")
        return v


class TrialOutcome(BaseModel):
    """Result of one execution of a problem by the core."""

    success: bool

    reward: confloat(ge=0) = 0.0  # type: ignore[valid-type]
    """Task reward R; defaults to 1 for a success, 0 otherwise."""

    feedback: Optional[str] = None
    """Failure message, passed on to refinement."""

    output_tokens: NonNegativeInt = 0

    class Config:
        allow_mutation = False

    @root_validator(pre=True)
    def _default_reward(cls, values):
        if values.get('reward') is None:
            values['reward'] = 1.0 if values.get('success') else 0.0
        return values


class Teacher(Protocol):
    """A strategy proposer and refiner."""

    def propose(self, problem: Problem) -> str:
        ...

    def refine(self, problem: Problem, strategy: str, feedback: str) -> str:
        ...


class Executor(Protocol):
    """A black-box core: executes a problem, optionally guided.

    Implementations raise :class:`acceptance.exceptions.TrialError`
    (or a gateway error) when no outcome could be produced.
    An executor may declare ``deterministic = True``
    when repeated runs give identical outcomes.
    """

    def run(
        self,
        problem: Problem,
        strategy: Optional[str],
        seed: int,
    ) -> TrialOutcome:
        ...


class AcceptanceConfig(BaseModel):
    """Parameters of acceptance sampling."""

    k_trials: PositiveInt = 50
    """K, validation trials per strategy."""

    tau: confloat(gt=0, lt=1) = 0.7  # type: ignore[valid-type]
    """τ, acceptance threshold on the empirical success rate."""

    eta: confloat(gt=0) = 0.05  # type: ignore[valid-type]
    """η, slack of the Hoeffding validation bound."""

    m_samples: PositiveInt = 100
    """M, first-round decisions the acceptance rate is estimated from;
    fewer are used when fewer problems were resolved."""

    epsilon: confloat(gt=0) = 0.05  # type: ignore[valid-type]
    """ε, width of the acceptance-rate lower confidence bound."""

    max_refinements: NonNegativeInt = 3

    trial_retries: NonNegativeInt = 2
    """Extra attempts for a trial whose executor call errored."""

    max_in_flight: Optional[PositiveInt] = None
    """Problems curated concurrently; defaults to
    ``GCOP_CURATION_IN_FLIGHT``."""

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _positive_margin(cls, values):
        if values['tau'] - values['eta'] <= 0:
            raise ValueError(
                "tau - eta must be positive for a meaningful bound")
        return values


class AcceptanceRateBound(BaseModel):
    """Empirical acceptance rate with a one-sided lower bound."""

    m_samples: PositiveInt

    a_hat: confloat(ge=0, le=1)  # type: ignore[valid-type]

    a_lcb: confloat(ge=0, le=1)  # type: ignore[valid-type]
    """``max(a_hat − ε, 0)``."""

    confidence: confloat(ge=0, le=1)  # type: ignore[valid-type]
    """``1 − exp(−2Mε²)``."""

    class Config:
        allow_mutation = False


class AcceptanceCertificate(BaseModel):
    """Guarantee on the expected success of accepted strategies."""

    delta: confloat(gt=0, le=1)  # type: ignore[valid-type]
    """``exp(−2Kη²)``."""

    a_hat: confloat(ge=0, le=1)  # type: ignore[valid-type]
    a_lcb: confloat(ge=0, le=1)  # type: ignore[valid-type]
    confidence: confloat(ge=0, le=1)  # type: ignore[valid-type]

    m_samples: PositiveInt
    """Number of first-round proposals the rate was estimated from."""

    bound: Optional[float]
    """``(τ − η)·(1 − δ / a_lcb)``; undefined when ``a_lcb`` is 0."""

    nonvacuous: bool
    """``δ ≤ a_lcb``."""

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _nonvacuous_bound_is_non_negative(cls, values):
        if values['nonvacuous'] and (
                values['bound'] is None or values['bound'] < 0):
            raise ValueError("a nonvacuous certificate has a bound ≥ 0")
        return values

    def to_record(self) -> Dict[str, Any]:
        return {'kind': 'certificate', **self.dict()}


class CorpusRecord(BaseModel):
    """One validated (problem, strategy) pair.

    All refinement rounds are recorded;
    accepted records make up the supervised corpus.
    """

    problem_id: str
    problem_text: str
    strategy_text: str

    q_hat: confloat(ge=0, le=1)  # type: ignore[valid-type]

    refinement_round: NonNegativeInt

    accepted: bool

    class Config:
        allow_mutation = False

    def to_record(self) -> Dict[str, Any]:
        return self.dict()

"""Classification: state construction, steady-state reasoning, explanations.

The decision reads the class concepts' final membership degrees: predicted
class = argmax mu, ties broken by lower real hesitancy, then by lower class
id. Explanations render the winning and runner-up evidence as linguistic
clauses over the part concepts owned by those classes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ifs import IFValue
from .reasoning import IFState, ReasoningResult, real_hesitancy, run_reasoning
from .store import FeaturePack
from .training import IfcmModel, extract_region_vectors, similarity


class DimensionMismatchError(ValueError):
    """Input feature geometry does not match the trained model."""


@dataclass(frozen=True)
class StateVector:
    """Initial concept activations, one pair per concept.

    Input entries carry the image's characterization against each medoid's
    relation set; outputs start at <0, 1> so their activation is driven
    entirely by incoming evidence.
    """
    inputs: tuple
    outputs: tuple

    def as_ifstate(self) -> IFState:
        pairs = self.inputs + self.outputs
        return IFState(np.array([p.mu for p in pairs]),
                       np.array([p.gamma for p in pairs]))


@dataclass(frozen=True)
class ClassScore:
    """Final reading of one class concept."""
    value: IFValue
    hesitancy: float  # real hesitancy, transfer inverted


@dataclass(eq=False)
class ClassDecision:
    class_id: int
    runner_up: int | None
    scores: dict[int, ClassScore]  # keyed by class_id, model class order
    iterations: int
    converged: bool
    result: ReasoningResult
    state0: StateVector


@dataclass(frozen=True)
class Clause:
    concept_label: str
    similarity_term: str
    hesitancy_term: str
    polarity: int  # +1 supporting the winning class, -1 opposing

    @property
    def text(self) -> str:
        return (f"{self.similarity_term} similarity with "
                f"{self.hesitancy_term} hesitancy with {self.concept_label}")


@dataclass(frozen=True)
class Explanation:
    class_name: str
    runner_up_name: str | None
    positive: tuple
    negative: tuple

    def render(self) -> str:
        lines = [_bullet("The input image is classified as "
                         f'"{self.class_name}" because it has',
                         self.positive)]
        if self.negative:
            lines.append(_bullet("The input image cannot be classified as "
                                 f'"{self.runner_up_name}" because it has',
                                 self.negative))
        return "\n".join(lines)


def _bullet(lead: str, clauses) -> str:
    parts = [f"({chr(ord('a') + i)}) {c.text}"
             for i, c in enumerate(clauses)]
    return f"- {lead} " + "; ".join(parts) + "."


def build_state_vector(d_set, model: IfcmModel) -> StateVector:
    """Characterize an image's region vectors against every part concept."""
    d = np.asarray(d_set, dtype=float)
    if d.ndim == 1:
        d = d[None, :]
    if d.ndim != 2 or d.size == 0:
        raise DimensionMismatchError(
            "expected a non-empty 2-D array of region feature vectors")
    dim = model.medoids[0].vector.size
    if d.shape[1] != dim:
        raise DimensionMismatchError(
            f"region vectors carry {d.shape[1]} features, "
            f"the model expects {dim}")
    z = similarity(d, model.medoids)
    inputs = []
    for union, z_m in zip(model.unions, z):
        mu = float(union.mu_fn(z_m))
        gamma = float(union.gamma_fn(z_m))
        if mu + gamma > 1.0:  # off-grid float excess; membership wins
            gamma = 1.0 - mu
        inputs.append(IFValue(mu, gamma))
    outputs = tuple(IFValue(0.0, 1.0) for _ in model.classes)
    return StateVector(tuple(inputs), outputs)


def classify(model: IfcmModel, subject, config=None) -> ClassDecision:
    """Decide the class of a pack, a region-vector set, or a prepared state.

    A non-converged run still yields a decision; callers that care can check
    `converged`.
    """
    if isinstance(subject, StateVector):
        state0 = subject
    elif isinstance(subject, FeaturePack):
        state0 = build_state_vector(
            extract_region_vectors(subject, model.config), model)
    else:
        state0 = build_state_vector(subject, model)
    if (len(state0.inputs) != model.n_inputs
            or len(state0.outputs) != model.n_outputs):
        raise DimensionMismatchError(
            f"state carries {len(state0.inputs)}+{len(state0.outputs)} "
            f"concepts, the model has {model.n_inputs}+{model.n_outputs}")
    cfg = config or model.reasoning
    result = run_reasoning(state0.as_ifstate(), model.weight_matrix(), cfg)
    final = result.final
    m = model.n_inputs
    scores: dict[int, ClassScore] = {}
    ranking = []
    for k, spec in enumerate(model.classes):
        mu = float(final.mu[m + k])
        gamma = float(final.gamma[m + k])
        h = real_hesitancy(mu, gamma, cfg.f_mu, cfg.f_gamma,
                           diagnostics=result.diagnostics)
        scores[spec.class_id] = ClassScore(IFValue(mu, gamma), h)
        ranking.append((-mu, h, spec.class_id))
    ranking.sort()
    runner = ranking[1][2] if len(ranking) > 1 else None
    return ClassDecision(class_id=ranking[0][2], runner_up=runner,
                         scores=scores, iterations=result.iterations,
                         converged=result.converged, result=result,
                         state0=state0)


def _clauses(decision: ClassDecision, model: IfcmModel, class_id: int,
             polarity: int) -> tuple:
    cfg = model.reasoning
    final = decision.result.final
    out = []
    for idx, medoid in enumerate(model.medoids):
        if medoid.class_id != class_id:
            continue
        mu = float(final.mu[idx])
        h = real_hesitancy(mu, float(final.gamma[idx]), cfg.f_mu, cfg.f_gamma,
                           diagnostics=decision.result.diagnostics)
        out.append(Clause(medoid.concept_label, model.partition.term(mu),
                          model.partition.term(h), polarity))
    return tuple(out)


def explain(decision: ClassDecision, model: IfcmModel) -> Explanation:
    """Linguistic account of the decision over the owning part concepts."""
    positive = _clauses(decision, model, decision.class_id, +1)
    negative = (_clauses(decision, model, decision.runner_up, -1)
                if decision.runner_up is not None else ())
    names = {c.class_id: c.name for c in model.classes}
    return Explanation(class_name=names[decision.class_id],
                       runner_up_name=names.get(decision.runner_up),
                       positive=positive, negative=negative)


def trace_export(decision) -> str:
    """CSV trajectory, one row per (iteration, concept), 9 significant digits.

    Accepts a ClassDecision or a bare ReasoningResult. The hesitancy column
    is the plain complement 1 - mu - gamma of the squashed degrees.
    """
    result = decision.result if isinstance(decision, ClassDecision) \
        else decision
    lines = ["iteration,concept_id,mu,gamma,hesitancy"]
    for t, state in enumerate(result.states):
        for i, (mu, gamma) in enumerate(zip(state.mu, state.gamma)):
            h = 1.0 - mu - gamma
            lines.append(f"{t},{i},{mu:.9g},{gamma:.9g},{h:.9g}")
    return "\n".join(lines) + "\n"

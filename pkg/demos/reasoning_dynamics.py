"""
Watching an intuitionistic cognitive map settle
===============================================

Four concepts: two evidence nodes feeding two conclusion nodes plus each
other. Memberships accumulate through a probabilistic OR and rise;
non-memberships multiply through their neighborhood and decay. The run
stops when neither degree moves more than epsilon.
"""
import numpy as np

from ifcm import (
    IFState,
    ReasoningConfig,
    TransferFunction,
    WeightMatrix,
    real_hesitancy,
    run_reasoning,
    trace_export,
)

# weights are directed, w[src, dst]; conclusions emit nothing back
w_mu = np.array([
    [0.0, 0.4, 0.8, 0.1],
    [0.4, 0.0, 0.2, 0.7],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])
w_ga = np.array([
    [0.0, 0.2, 0.1, 0.5],
    [0.2, 0.0, 0.4, 0.1],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])
weights = WeightMatrix(w_mu, w_ga)

# evidence starts partly known; conclusions start fully unknown <0, 1>
state0 = IFState(np.array([0.7, 0.3, 0.0, 0.0]),
                 np.array([0.1, 0.5, 1.0, 1.0]))

result = run_reasoning(state0, weights, ReasoningConfig(epsilon=1e-5))
print(f"converged: {result.converged} after {result.iterations} iterations")

print("\nconclusion node 2 over time (mu up, gamma down):")
for t, st in enumerate(result.states[:6]):
    print(f"  t={t}: mu={st.mu[2]:.4f}  gamma={st.gamma[2]:.4f}")
final = result.final
print(f"  ...settling at mu={final.mu[2]:.4f} gamma={final.gamma[2]:.6f}")

# the squash compresses everything toward the middle, so the honest
# hesitancy reading inverts the transfer first
f = TransferFunction("tanh")
for i in (2, 3):
    h = real_hesitancy(float(final.mu[i]), float(final.gamma[i]), f, f)
    print(f"concept {i}: real hesitancy {h:.4f}")

# the whole trajectory exports as CSV for plotting
csv = trace_export(result)
print(f"\ntrace: {len(csv.splitlines()) - 1} rows, first three:")
for line in csv.splitlines()[:4]:
    print(f"  {line}")

"""
End to end: train on synthetic packs, classify, hear the reasons
================================================================

Three classes of synthetic images, each a mosaic of two characteristic
part prototypes. Training mines the prototypes back out of the data,
learns fuzzy relations from similarity statistics, and wires the map.
Classification then runs the map to a fixed point and phrases the
verdict in words.
"""
import numpy as np

from ifcm import ClassSpec, TrainingConfig, classify, explain, train
from synthetic_corpus import make_corpus

corpus = make_corpus(per_class=30, n_classes=3, seed=7)
fit, held_out = corpus[:20] + corpus[30:50] + corpus[60:80], \
    corpus[20:30] + corpus[50:60] + corpus[80:90]

names = [ClassSpec(1, "Flamingo"), ClassSpec(2, "Rhino"),
         ClassSpec(3, "Kangaroo")]
cfg = TrainingConfig(clusters_per_class=2, e_b=5, e_q=5,
                     mf_shape="triangular", seed=0)
model = train(fit, cfg, classes=names)

print(f"model: {model.n_inputs} part concepts + "
      f"{model.n_outputs} class concepts")
for idx, medoid in enumerate(model.medoids):
    print(f"  {idx}: {medoid.concept_label} "
          f"({len(model.pair_sets[idx])} relation sets)")
neutral = sum(e.neutral for e in model.edges)
print(f"edges: {len(model.edges)} ({neutral} neutral across classes)")

# held-out accuracy against the generator's ground truth
correct = 0
for pack in held_out:
    if classify(model, pack).class_id == pack.class_id:
        correct += 1
print(f"\nheld-out accuracy: {correct}/{len(held_out)}")

# one decision in detail
pack = held_out[0]
decision = classify(model, pack)
print(f"\n{pack.image_id} (truth: class {pack.class_id})")
for cid, score in decision.scores.items():
    print(f"  class {cid}: mu={score.value.mu:.3f} "
          f"gamma={score.value.gamma:.3f} "
          f"real hesitancy={score.hesitancy:.3f}")

# the same decision as the classifier would explain it
print()
print(explain(decision, model).render())

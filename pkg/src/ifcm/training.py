"""Data-driven construction of an intuitionistic cognitive map classifier.

Pipeline: pool region features per class, mine part prototypes (medoids) by
clustering, measure every image's similarity to every medoid, build paired
membership/non-membership function families from the same-class and
other-class similarity populations, and defuzzify those families into edge
weights. Inputs are medoid concepts, outputs are class concepts; outputs are
sinks.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .features import (
    DEFAULT_COMPACTNESS,
    FeatureMaps,
    SuperpixelMap,
    pool_superpixels,
    rescale_maps,
    select_informative,
    slic_segment,
)
from .ifs import (
    IFValue,
    IndeterminateRelationError,
    IntuitionisticFuzzySet,
    Gaussian,
    LinguisticPartition,
    Scaled,
    Trapezoidal,
    Triangular,
    ifs_intersection,
    ifs_union,
    ifs_validate,
    ifvalue_clamped,
    icoa,
    linguistic_partition,
)
from .reasoning import ReasoningConfig, TransferFunction, WeightMatrix

KMEANS_MAX_ITERS = 100
KMEANS_TOL = 1e-6


class TrainingDataError(ValueError):
    """Training inputs cannot support the requested model."""


@dataclass(frozen=True)
class ClassSpec:
    class_id: int  # 1-based
    name: str

    def __post_init__(self):
        if self.class_id < 1:
            raise ValueError("class ids start at 1")


@dataclass(eq=False)
class Medoid:
    """A part prototype: an actual training feature vector."""
    vector: np.ndarray
    class_id: int
    concept_label: str

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=float)


@dataclass(frozen=True)
class SimilarityRecord:
    image_id: str
    medoid_index: int
    z: float
    same_class: bool

    def __post_init__(self):
        if not 0.0 <= self.z <= 1.0:
            raise ValueError(f"similarity {self.z} outside [0, 1]")


@dataclass
class TrainingConfig:
    clusters_per_class: int = 2
    e_b: int = 5
    e_q: int = 5
    mf_shape: str = "gaussian"
    cluster_range: tuple[int, int] = (5, 50)
    set_range: tuple[int, int] = (5, 15)
    superpixels: int = 16
    compactness: float = DEFAULT_COMPACTNESS
    levels: int = 5
    seed: int = 0
    transfer: str = "tanh"
    lam: float = 1.0
    epsilon: float = 1e-5
    max_iters: int = 100

    def __post_init__(self):
        if self.clusters_per_class < 1:
            raise ValueError("clusters_per_class must be at least 1")
        if self.e_b < 2 or self.e_q < 2:
            raise ValueError("fuzzy-set counts must be at least 2")
        if self.mf_shape not in ("triangular", "gaussian"):
            raise ValueError(f"unknown shape {self.mf_shape!r}")


@dataclass(eq=False)
class Edge:
    """Directed influence from concept `src` into concept `dst`."""
    src: int
    dst: int
    weight: IFValue
    kind: str  # "input_output" | "input_input"
    polarity: int  # +1 same-class support, -1 cross-class opposition
    neutral: bool  # weight fell back to <0,0> (indeterminate defuzzification)
    relation: IntuitionisticFuzzySet


@dataclass(eq=False)
class IfcmModel:
    """Immutable trained classifier.

    Concept order: inputs 0..M-1 (one per medoid, grouped by class), then
    outputs M..M+F-1 (one per class, in class-id order).
    """
    classes: list[ClassSpec]
    medoids: list[Medoid]
    pair_sets: list[list[IntuitionisticFuzzySet]]  # per-medoid IFS library
    unions: list[IntuitionisticFuzzySet]  # per-medoid aggregate relation
    edges: list[Edge]
    partition: LinguisticPartition
    reasoning: ReasoningConfig
    config: TrainingConfig
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_inputs(self) -> int:
        return len(self.medoids)

    @property
    def n_outputs(self) -> int:
        return len(self.classes)

    @property
    def n_concepts(self) -> int:
        return self.n_inputs + self.n_outputs

    def output_index(self, class_id: int) -> int:
        for pos, spec in enumerate(self.classes):
            if spec.class_id == class_id:
                return self.n_inputs + pos
        raise KeyError(f"unknown class id {class_id}")

    def weight_matrix(self) -> WeightMatrix:
        n = self.n_concepts
        w_mu = np.zeros((n, n))
        w_ga = np.zeros((n, n))
        for e in self.edges:
            w_mu[e.src, e.dst] = e.weight.mu
            w_ga[e.src, e.dst] = e.weight.gamma
        return WeightMatrix(w_mu, w_ga)


def _kmeans(points: np.ndarray, k: int, rng: np.random.Generator):
    """Plain Lloyd iteration with distance-weighted seeding; deterministic
    for a fixed generator state. Returns (centers, labels)."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    closest = np.sum((points - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centers[i] = points[idx]
        closest = np.minimum(closest,
                             np.sum((points - centers[i]) ** 2, axis=1))
    labels = np.zeros(n, dtype=int)
    for _ in range(KMEANS_MAX_ITERS):
        d = np.sum((points[:, None] - centers[None]) ** 2, axis=2)
        labels = np.argmin(d, axis=1)
        moved = 0.0
        scale = float(np.abs(centers).max()) + 1e-12
        for j in range(k):
            members = points[labels == j]
            if len(members) == 0:
                # reseed on the point farthest from its center
                far = int(np.argmax(d[np.arange(n), labels]))
                centers[j] = points[far]
                moved = np.inf
                continue
            new = members.mean(axis=0)
            moved = max(moved, float(np.linalg.norm(new - centers[j])))
            centers[j] = new
        if moved / scale <= KMEANS_TOL:
            break
    d = np.sum((points[:, None] - centers[None]) ** 2, axis=2)
    labels = np.argmin(d, axis=1)
    return centers, labels


def mine_concepts(class_features: dict, m_f: int,
                  class_names: dict | None = None,
                  seed: int = 0) -> list[Medoid]:
    """Cluster each class's feature vectors and keep one member per cluster.

    Centroids are snapped to the nearest actual member vector, so every
    prototype is a real observed region. Medoids are ordered by class id,
    then by their first-member position (deterministic for a fixed seed).
    """
    medoids: list[Medoid] = []
    for class_id in sorted(class_features):
        vectors = np.asarray(class_features[class_id], dtype=float)
        if vectors.ndim != 2 or len(vectors) < m_f:
            raise TrainingDataError(
                f"class {class_id} has {len(vectors)} feature vectors, "
                f"needs at least {m_f}")
        rng = np.random.default_rng(seed + class_id)
        centers, labels = _kmeans(vectors, m_f, rng)
        name = (class_names or {}).get(class_id, f"class{class_id}")
        picked = []
        for j in range(m_f):
            members = np.nonzero(labels == j)[0]
            pool = members if len(members) else np.arange(len(vectors))
            dist = np.linalg.norm(vectors[pool] - centers[j], axis=1)
            picked.append(int(pool[int(np.argmin(dist))]))
        for rank, idx in enumerate(sorted(picked)):
            medoids.append(Medoid(vectors[idx].copy(), class_id,
                                  f"{name}-part{rank + 1}"))
    return medoids


def similarity(d_set, medoids: list[Medoid]) -> np.ndarray:
    """Normalized similarity of one image's region set to every prototype.

    For each region d: its distance to medoid m is expressed as a share of
    its total distance to all medoids, and 1 - share is averaged over the
    regions. A region coinciding with every medoid contributes the uniform
    value 1 - 1/M.
    """
    if len(medoids) < 2:
        raise TrainingDataError("similarity needs at least 2 medoids")
    d = np.asarray(d_set, dtype=float)
    if d.ndim != 2 or d.shape[0] < 1:
        raise ValueError("d_set must be a non-empty list of vectors")
    r = np.stack([m.vector for m in medoids])
    dists = np.sqrt(np.sum((d[:, None] - r[None]) ** 2, axis=2))
    tot = dists.sum(axis=1, keepdims=True)
    m = len(medoids)
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(tot > 0, 1.0 - dists / tot, 1.0 - 1.0 / m)
    return terms.mean(axis=0)


def build_mf_family(values, e: int, shape: str = "triangular"):
    """Cluster a similarity population into `e` overlapping functions.

    Apexes are the 1-D cluster medoids, sorted ascending. Triangular shape:
    interior triangles reach to the neighboring apexes; the two end
    functions spread as shoulders to 0 and to 1, so the family covers the
    whole domain with no gaps. Gaussian shape: one bump per apex, width
    half the gap to the nearest neighbor (floored at 0.05).

    `e` is silently clamped to the number of distinct values.
    """
    vals = np.asarray(values, dtype=float).ravel()
    if vals.size == 0:
        raise ValueError("cannot build a family from no values")
    if e < 1:
        raise ValueError("family size must be at least 1")
    if shape not in ("triangular", "gaussian"):
        raise ValueError(f"unknown shape {shape!r}")
    distinct = np.unique(vals)
    e_eff = min(e, distinct.size)
    if e_eff == distinct.size:
        apexes = distinct
    else:
        rng = np.random.default_rng(0)
        centers, labels = _kmeans(vals[:, None], e_eff, rng)
        apexes = []
        for j in range(e_eff):
            members = vals[labels == j]
            pool = members if members.size else vals
            apexes.append(pool[np.argmin(np.abs(pool - centers[j, 0]))])
        apexes = np.unique(apexes)
    apexes = np.asarray(apexes, dtype=float)

    if shape == "gaussian":
        if apexes.size == 1:
            return [Gaussian(float(apexes[0]), 0.5)]
        gaps = np.diff(apexes)
        out = []
        for i, c in enumerate(apexes):
            near = min(gaps[max(i - 1, 0)], gaps[min(i, gaps.size - 1)])
            out.append(Gaussian(float(c), max(0.05, float(near) / 2.0)))
        return out

    if apexes.size == 1:
        c = float(apexes[0])
        return [Triangular(c - 1.05, c, c + 1.05)]
    fns = [Trapezoidal(0.0, 0.0, float(apexes[0]), float(apexes[1]),
                       apex=float(apexes[0]))]
    for i in range(1, apexes.size - 1):
        fns.append(Triangular(float(apexes[i - 1]), float(apexes[i]),
                              float(apexes[i + 1])))
    fns.append(Trapezoidal(float(apexes[-2]), float(apexes[-1]), 1.0, 1.0,
                           apex=float(apexes[-1])))
    return fns


def pair_ifs(b_family, q_family,
             partition: LinguisticPartition | None = None
             ) -> list[IntuitionisticFuzzySet]:
    """All (membership, non-membership) pairs that form a valid set.

    Each kept pair is labeled with the linguistic term of its membership
    apex. When no raw pair is valid, both families are damped to half
    amplitude, which makes every pair valid; callers can detect the damping
    through the Scaled wrappers.
    """
    if not b_family or not q_family:
        raise ValueError("both families must be non-empty")
    part = partition or linguistic_partition(5)

    def filter_pairs(bs, qs):
        out = []
        for b in bs:
            for q in qs:
                cand = IntuitionisticFuzzySet(b, q, label=part.term(b.peak))
                if ifs_validate(cand):
                    out.append(cand)
        return out

    pairs = filter_pairs(b_family, q_family)
    if pairs:
        return pairs
    return filter_pairs([Scaled(b, 0.5) for b in b_family],
                        [Scaled(q, 0.5) for q in q_family])


def weight_input_output(ifs_set, same_class_sims, diagnostics: dict | None = None
                        ) -> tuple[IFValue, IntuitionisticFuzzySet]:
    """Defuzzify a medoid's aggregate relation over its own-class evidence.

    The pair set collapses by union, the union is reduced to a single
    characteristic similarity by center-of-area over the same-class
    samples, and the weight is the union evaluated there. Indeterminate
    center-of-area yields the neutral weight <0, 0>.
    """
    union = ifs_union(list(ifs_set))
    try:
        z = icoa(union, same_class_sims)
    except IndeterminateRelationError:
        if diagnostics is not None:
            diagnostics["neutral_edges"] = diagnostics.get("neutral_edges", 0) + 1
        return IFValue(0.0, 0.0), union
    w = ifvalue_clamped(union.mu_fn(z), union.gamma_fn(z), diagnostics)
    return w, union


def weight_input_input(ifs_i, ifs_j, sims_i, sims_j,
                       diagnostics: dict | None = None
                       ) -> tuple[IFValue, IntuitionisticFuzzySet]:
    """Mutual weight of two part concepts through their set intersection.

    Evidence pools the similarity samples of the images shared by both
    concepts' populations; the weight is the intersection evaluated at the
    pooled center-of-area. No shared evidence, or disjoint memberships,
    fall back to the neutral weight.
    """
    inter = ifs_intersection(ifs_union(list(ifs_i)), ifs_union(list(ifs_j)))
    pooled = np.concatenate([np.asarray(sims_i, dtype=float).ravel(),
                             np.asarray(sims_j, dtype=float).ravel()])
    try:
        if pooled.size == 0:
            raise IndeterminateRelationError("no shared evidence")
        z = icoa(inter, pooled)
    except IndeterminateRelationError:
        if diagnostics is not None:
            diagnostics["neutral_edges"] = diagnostics.get("neutral_edges", 0) + 1
        return IFValue(0.0, 0.0), inter
    w = ifvalue_clamped(inter.mu_fn(z), inter.gamma_fn(z), diagnostics)
    return w, inter


def _swap(s: IntuitionisticFuzzySet) -> IntuitionisticFuzzySet:
    return IntuitionisticFuzzySet(s.gamma_fn, s.mu_fn, label=s.label)


def _cross_class_weight(pairs, union, target_sims, diagnostics: dict
                        ) -> tuple[IFValue, bool]:
    """Weight from a part concept to a class it does not belong to.

    The evidence roles are swapped (the other-class population carries the
    membership role), the swapped union is defuzzified over the target
    class's similarities, and the ORIGINAL relation is evaluated there: low
    membership, high non-membership, which is the negative-causality
    encoding.
    """
    swapped = ifs_union([_swap(p) for p in pairs])
    try:
        z = icoa(swapped, target_sims)
    except IndeterminateRelationError:
        diagnostics["neutral_edges"] = diagnostics.get("neutral_edges", 0) + 1
        return IFValue(0.0, 0.0), True
    return ifvalue_clamped(union.mu_fn(z), union.gamma_fn(z), diagnostics), False


def extract_region_vectors(pack, cfg: TrainingConfig) -> np.ndarray:
    """FeaturePack -> selected region feature matrix (P' x delta)."""
    maps = FeatureMaps(pack.maps)
    if pack.labels is not None:
        sp = SuperpixelMap(pack.labels)
    elif pack.raster is not None:
        from .features import Raster
        sp = slic_segment(Raster(pack.raster), cfg.superpixels,
                          cfg.compactness)
    else:
        from .store import PackFormatError
        raise PackFormatError(
            f"pack {pack.image_id!r} carries neither raster nor region labels")
    scaled = rescale_maps(maps, sp.height, sp.width)
    feats = pool_superpixels(scaled, sp)
    picked = select_informative(feats)
    return np.stack([f.vector for f in picked])


def train(packs, cfg: TrainingConfig,
          classes: list[ClassSpec] | None = None) -> IfcmModel:
    """Build the full map from labeled feature packs.

    Topology: every part concept feeds every class concept (supporting its
    own class, opposing the rest) and every other part concept (symmetric
    mutual edges). Class concepts are sinks.
    """
    packs = list(packs)
    if classes is None:
        ids = sorted({p.class_id for p in packs if p.class_id is not None})
        classes = [ClassSpec(i, f"class{i}") for i in ids]
    by_id = {c.class_id: c for c in classes}
    if len(by_id) != len(classes):
        raise TrainingDataError("duplicate class ids in the class list")
    if sorted(by_id) != list(range(1, len(classes) + 1)):
        raise TrainingDataError("class ids must be contiguous from 1")
    if len(classes) < 2:
        raise TrainingDataError("training needs at least 2 classes")

    counts: dict[int, int] = {}
    for p in packs:
        if p.class_id is None:
            raise TrainingDataError(f"pack {p.image_id!r} has no class label")
        if p.class_id not in by_id:
            raise TrainingDataError(
                f"pack {p.image_id!r} references unknown class {p.class_id}")
        counts[p.class_id] = counts.get(p.class_id, 0) + 1
    for c in classes:
        have = counts.get(c.class_id, 0)
        if have < cfg.clusters_per_class:
            raise TrainingDataError(
                f"class {c.class_id} ({c.name}) has {have} images, needs at "
                f"least {cfg.clusters_per_class}")

    region_sets = [extract_region_vectors(p, cfg) for p in packs]
    class_features = {c.class_id: [] for c in classes}
    for p, regions in zip(packs, region_sets):
        class_features[p.class_id].extend(regions)

    medoids = mine_concepts(class_features, cfg.clusters_per_class,
                            {c.class_id: c.name for c in classes},
                            seed=cfg.seed)
    m = len(medoids)
    sims = np.stack([similarity(regions, medoids) for regions in region_sets])
    image_classes = np.array([p.class_id for p in packs])

    partition = linguistic_partition(cfg.levels)
    diagnostics: dict = {}
    pair_sets, unions = [], []
    scaled_medoids = []
    for mi, medoid in enumerate(medoids):
        own = sims[image_classes == medoid.class_id, mi]
        other = sims[image_classes != medoid.class_id, mi]
        b_family = build_mf_family(own, cfg.e_b, cfg.mf_shape)
        q_family = build_mf_family(other, cfg.e_q, cfg.mf_shape)
        pairs = pair_ifs(b_family, q_family, partition)
        if pairs and isinstance(pairs[0].mu_fn, Scaled):
            scaled_medoids.append(mi)
        pair_sets.append(pairs)
        unions.append(ifs_union(pairs))
    if scaled_medoids:
        diagnostics["scaled_medoids"] = scaled_medoids

    edges: list[Edge] = []
    for mi, medoid in enumerate(medoids):
        own_sims = sims[image_classes == medoid.class_id, mi]
        for pos, spec in enumerate(classes):
            dst = m + pos
            if spec.class_id == medoid.class_id:
                w, rel = weight_input_output(pair_sets[mi], own_sims,
                                             diagnostics)
                neutral = w.mu == 0.0 and w.gamma == 0.0
                edges.append(Edge(mi, dst, w, "input_output", +1, neutral,
                                  rel))
            else:
                target = sims[image_classes == spec.class_id, mi]
                w, neutral = _cross_class_weight(pair_sets[mi], unions[mi],
                                                 target, diagnostics)
                edges.append(Edge(mi, dst, w, "input_output", -1, neutral,
                                  unions[mi]))
    for i in range(m):
        for j in range(i + 1, m):
            # evidence = images in both concepts' populations, so mutual
            # edges across classes carry no samples and stay neutral
            shared = ((image_classes == medoids[i].class_id)
                      & (image_classes == medoids[j].class_id))
            w, rel = weight_input_input(pair_sets[i], pair_sets[j],
                                        sims[shared, i], sims[shared, j],
                                        diagnostics)
            neutral = w.mu == 0.0 and w.gamma == 0.0
            polarity = +1 if medoids[i].class_id == medoids[j].class_id else -1
            edges.append(Edge(i, j, w, "input_input", polarity, neutral, rel))
            edges.append(Edge(j, i, w, "input_input", polarity, neutral, rel))

    reasoning = ReasoningConfig(
        epsilon=cfg.epsilon, max_iters=cfg.max_iters,
        f_mu=TransferFunction(cfg.transfer, cfg.lam),
        f_gamma=TransferFunction(cfg.transfer, cfg.lam))
    return IfcmModel(classes=classes, medoids=medoids, pair_sets=pair_sets,
                     unions=unions, edges=edges, partition=partition,
                     reasoning=reasoning, config=cfg,
                     diagnostics=diagnostics)


def grid_search(packs, cluster_range, set_range, folds: int = 3,
                cfg: TrainingConfig | None = None,
                scores_out: list | None = None) -> TrainingConfig:
    """Pick (clusters_per_class, family size) by held-out accuracy.

    Exhaustive over the two candidate lists with E_b = E_q; stratified
    round-robin folds; configurations that cannot train on some fold are
    skipped. Ties prefer the smaller model (fewer clusters, then fewer
    sets). Candidate order does not matter: candidates are sorted before
    the sweep. When `scores_out` is given, every usable configuration
    appends a (clusters, sets, accuracy) row to it.
    """
    from .inference import classify  # local import to avoid a module cycle

    clusters = sorted(set(int(c) for c in cluster_range))
    sets = sorted(set(int(s) for s in set_range))
    if not clusters or not sets:
        raise ValueError("both candidate ranges must be non-empty")
    if folds < 2:
        raise ValueError("grid search needs at least 2 folds")
    base = cfg or TrainingConfig()
    packs = list(packs)

    by_class: dict[int, list[int]] = {}
    for idx, p in enumerate(packs):
        by_class.setdefault(p.class_id, []).append(idx)
    fold_of = np.zeros(len(packs), dtype=int)
    rng = np.random.default_rng(base.seed)
    for ids in by_class.values():
        ids = list(ids)
        rng.shuffle(ids)
        for pos, idx in enumerate(ids):
            fold_of[idx] = pos % folds

    best = None  # (accuracy, -clusters, -sets) maximized
    best_cfg = None
    for c in clusters:
        for s in sets:
            candidate = replace(base, clusters_per_class=c, e_b=s, e_q=s)
            correct = total = 0
            usable = True
            for fold in range(folds):
                train_packs = [p for p, fo in zip(packs, fold_of)
                               if fo != fold]
                test_packs = [p for p, fo in zip(packs, fold_of)
                              if fo == fold]
                if not test_packs:
                    continue
                try:
                    model = train(train_packs, candidate)
                except (TrainingDataError, ValueError):
                    usable = False
                    break
                for p in test_packs:
                    if classify(model, p).class_id == p.class_id:
                        correct += 1
                    total += 1
            if not usable or total == 0:
                continue
            score = (correct / total, -c, -s)
            if scores_out is not None:
                scores_out.append((c, s, correct / total))
            if best is None or score > best:
                best, best_cfg = score, candidate
    if best_cfg is None:
        raise TrainingDataError("no grid-search configuration could train")
    return best_cfg

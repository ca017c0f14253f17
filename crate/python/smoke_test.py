"""Smoke test for the keep_regrow extension module.

Build and stage the module first:

    cargo build --release -p keep-regrow-py
    cp target/release/libkeep_regrow_py.so python/keep_regrow.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import keep_regrow as kr


def main():
    iris = kr.Dataset.iris()
    assert len(iris) == 150 and iris.n_features == 4 and iris.n_classes == 3

    sample = iris.subset(list(range(0, 150, 10)))
    t0 = kr.retrain(sample, alpha=1.0)
    t1 = kr.update(t0, iris, alpha=1.0, beta=1.0)
    delta, sim, rows = kr.structural_diff(t0, t1)
    assert delta == kr.change_count(t0, t1)
    assert 0.0 <= sim <= 1.0
    assert len(rows) == t1.node_count()

    l1 = kr.loss(t0, t1, iris, 1.0, 1.0)
    l0 = kr.loss(t0, t0, iris, 1.0, 1.0)
    assert l1["total"] <= l0["total"]

    huge = len(iris) + t0.node_count() + 1.0
    assert kr.update(t0, iris, alpha=1.0, beta=huge) == t0

    grown = kr.grow(iris)
    pruned = kr.prune(grown, iris, alpha=5.0)
    assert pruned.node_count() <= grown.node_count()

    back = kr.Tree.from_json(t1.to_json())
    assert back == t1
    assert json.loads(t1.to_json())["kind"] in ("split", "leaf")
    assert "digraph" in t1.to_dot(t0)

    stump = kr.Tree.split(0, 2.5, kr.Tree.leaf(0), kr.Tree.leaf(1))
    d = kr.Dataset([[1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1])
    assert stump.predict([[1.0], [4.0]]) == [0, 1]
    assert kr.update(kr.Tree.leaf(0), d, alpha=0.1, beta=0.1) == stump

    assert round(kr.ci_half_width(0.5, 100_000), 4) == 0.0031

    try:
        kr.update(t0, iris, alpha=-1.0, beta=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")

    print(f"ok: t0 {t0.node_count()} nodes, t1 {t1.node_count()} nodes, delta {delta}, similarity {sim:.3f}")


if __name__ == "__main__":
    main()

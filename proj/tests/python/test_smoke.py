# Copyright 2026 The hiernexus Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import hiernexus as hn

BAT = json.dumps({
    "nodes": [
        {"id": "entity", "level": 1, "name": "entity"},
        {"id": "sports", "level": 2, "name": "sports equipment", "parents": ["entity"]},
        {"id": "bat", "level": 3, "name": "bat", "parents": ["sports"]},
        {"id": "baseball", "level": 4, "name": "baseball bat", "parents": ["bat"]},
        {"id": "wooden", "level": 5, "name": "wooden baseball bat", "parents": ["baseball"]},
        {"id": "cricket", "level": 4, "name": "cricket bat", "parents": ["bat"]},
    ]
})


def norm(v):
    return math.sqrt(sum(x * x for x in v))


def test_golden_sentence():
    b = hn.Branch(["wooden baseball bat", "baseball bat"], "bat",
                  ["sports equipment"])
    assert hn.render_is_a(b) == (
        "a wooden baseball bat, which is a baseball bat, which is a bat, "
        "which is a sports equipment")
    assert hn.render_concat(b) == (
        "a wooden baseball bat baseball bat bat sports equipment")


def test_hierarchy_and_branches(tmp_path):
    h = hn.SemanticHierarchy.from_json(BAT)
    assert len(h) == 6
    assert hn.super_chains(h, "bat") == [["sports equipment"]]
    assert len(hn.lowest_sub_chains(h, "bat")) == 2
    assert len(hn.enumerate_branches(h, "bat")) == 2
    assert hn.map_to_level(h, "bat", 2) == "sports equipment"
    path = str(tmp_path / "h.json")
    h.save(path)
    assert hn.SemanticHierarchy.load(path).fingerprint() == h.fingerprint()
    with pytest.raises(hn.HierarchyError):
        hn.SemanticHierarchy.from_json('{"nodes": [{"id": "a", "name": "a", '
                                       '"parents": ["missing"]}]}')


def test_classifier_round_trip(tmp_path):
    h = hn.SemanticHierarchy.from_json(BAT)
    backend = hn.make_backend("test:1:16")
    assert backend.dim == 16
    clf = hn.build_classifier(h, ["bat", "cricket bat"], backend)
    assert len(clf) == 2 and clf.dim == 16
    assert clf.strategy == "shine-mean"
    assert abs(norm(clf.row(0)) - 1.0) < 1e-5
    index, name, score = clf.predict([3.0 * x for x in clf.row(1)])
    assert (index, name) == (1, "cricket bat")
    assert abs(score - 1.0) < 1e-5
    path = str(tmp_path / "clf.json")
    clf.save(path)
    assert hn.NexusClassifier.load(path).row(0) == clf.row(0)
    base = hn.build_classifier(None, ["bat"], backend, "baseline-name")
    assert base.row(0) == backend.embed(["a bat"])[0]


def test_aggregators():
    mean = hn.aggregate_mean([[1.0, 0.0], [0.0, 1.0]])
    assert mean == pytest.approx([math.sqrt(0.5), math.sqrt(0.5)], abs=1e-6)
    pe = hn.aggregate_principal_eigenvector([[1.0, 0.0], [1.0, 0.0]])
    assert pe == pytest.approx([1.0, 0.0], abs=1e-6)
    with pytest.raises(hn.EmbeddingError):
        hn.aggregate_mean([])


def test_evaluation():
    assert hn.iou([0, 0, 2, 2], [1, 0, 3, 2]) == pytest.approx(1 / 3)
    gt = [("a", [0, 0, 10, 10], "dog")]
    dets = [("a", [0, 0, 10, 10], "dog", 0.1), ("a", [40, 40, 50, 50], "dog", 0.9)]
    report = hn.evaluate_map50(gt, dets)
    assert report["map50"] == 0.5
    assert report["level"] is None
    s = hn.summarize_levels([0.25, 1.0])
    assert s["AM"] == pytest.approx(0.625)
    assert s["HM"] == pytest.approx(0.4)
    assert s["GM"] == pytest.approx(0.5)
    with pytest.raises(hn.EvalError):
        hn.summarize_levels([0.0, 1.0])
    assert hn.expand_vocabulary(["Dog"], ["dog", "cat"]) == ["Dog", "cat"]


def test_synthesis_from_cache(tmp_path):
    prompt_sup = hn.super_prompt("bat", p=2)
    prompt_sub = hn.sub_prompt("bat", q=2)
    assert prompt_sup.endswith("separated by '&': bat")
    assert hn.parse_amp_list("1. a & 2. b") == ["a", "b"]
    script = {prompt_sup: ["tool & club"], prompt_sub: ["cricket bat & bat 2"]}
    cache = str(tmp_path / "cache")
    h, calls, hits = hn.synthesize_hierarchy(["bat"], script, p=2, q=2, t=1,
                                             cache_dir=cache)
    assert (calls, hits) == (2, 0)
    assert h.levels == 3
    assert sorted(h.names_at_level(1)) == ["club", "tool"]
    h2, calls, hits = hn.synthesize_hierarchy(["bat"], {}, p=2, q=2, t=1,
                                              cache_dir=cache)
    assert (calls, hits) == (0, 2)
    assert h2.to_json() == h.to_json()

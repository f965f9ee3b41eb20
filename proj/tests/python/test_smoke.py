"""End-to-end smoke tests for the Python bindings."""

import json

import pytest

import vibroute as vr


def test_route_index_and_score_reference_values():
    light = vr.AreaDurations(32, 95, 135)
    dark = vr.AreaDurations(21, 50, 149)
    assert vr.route_index(light) == 444.5
    assert vr.route_index(dark) == 394.0
    assert vr.route_score(light) == pytest.approx(1.6966, abs=1e-4)
    assert vr.route_score(dark) == pytest.approx(1.7909, abs=1e-4)

    cmp1 = vr.compare_routes(
        [vr.RouteCandidate("light-blue", light), vr.RouteCandidate("dark-blue", dark)]
    )
    assert cmp1.recommended == "dark-blue"

    cmp3 = vr.compare_routes(
        [
            vr.RouteCandidate("light-blue", vr.AreaDurations(173, 200, 120), 1.43),
            vr.RouteCandidate("dark-blue", vr.AreaDurations(104, 164, 197), 1.49),
        ]
    )
    assert cmp3.recommended == "light-blue"
    assert all(r.score_deviates for r in cmp3.ranked)
    assert "deviates" in vr.render_comparison_text(cmp3)


def test_synth_is_deterministic():
    profile = [(vr.Area.A1, 60), (vr.Area.A3, 30)]
    a = vr.synth_route(profile, seed=7)
    b = vr.synth_route(profile, seed=7)
    assert vr.serialize_csv(a) == vr.serialize_csv(b)
    assert a.areas[:60] == [vr.Area.A1] * 60
    assert a.areas[60:] == [vr.Area.A3] * 30
    c = vr.synth_route(profile, seed=8)
    assert c.areas == a.areas
    assert vr.serialize_csv(c) != vr.serialize_csv(a)


def test_train_classify_store_recommend(tmp_path):
    logs = [
        vr.synth_route([(area, 300)], seed=10 + i)
        for i, area in enumerate([vr.Area.A1, vr.Area.A2, vr.Area.A3])
    ]
    result = vr.train(logs, vr.FeatureConfig(vr.FeatureVariant.STD_YZ_V, 9))
    assert result.loo_accuracy > 0.9
    assert result.model.sigma > 0

    model_path = tmp_path / "model.json"
    vr.save_model(model_path, result.model)
    model = vr.load_model(model_path)

    rough = vr.synth_route([(vr.Area.A1, 40), (vr.Area.A3, 160)], seed=21)
    smooth = vr.synth_route([(vr.Area.A1, 170), (vr.Area.A2, 50)], seed=22)

    store = vr.RouteStore(tmp_path / "store")
    for name, tagged in [("rough", rough), ("smooth", smooth)]:
        trip = vr.classify_trip(model, tagged.log)
        assert len(trip.areas) == len(tagged.log.samples)
        store.put(vr.make_route_record(name, trip))

    assert store.ids() == ["rough", "smooth"]
    cmp = store.recommend(vr.GeoPoint(39.47, -0.35), vr.GeoPoint(39.49, -0.30))
    assert cmp.recommended == "smooth"
    assert cmp.ranked[0].metrics.index < cmp.ranked[1].metrics.index

    record = store.get("rough")
    geojson = json.loads(vr.to_geojson(record.trip))
    assert geojson["type"] == "FeatureCollection"
    assert len(geojson["features"]) == len(record.trip.log.samples)
    areas = {f["properties"]["area"] for f in geojson["features"]}
    assert areas <= {"A1", "A2", "A3"}

    events = vr.alert_replay(record.trip, lookahead=10)
    assert all(e.t_alert <= e.t_entry for e in events)
    assert all(e.zone != vr.Area.A1 for e in events)


def _hand_model(patterns, sigma):
    """Model document with identity ranges and explicit normalized patterns."""
    doc = {
        "format": "vibroute-model",
        "version": 1,
        "feature": {"variant": "raw-yz", "buffer": 0},
        "ranges": [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]],
        "sigma": sigma,
        "priors": [1 / 3, 1 / 3, 1 / 3],
        "costs": [1.0, 1.0, 1.0],
        "pattern_dim": 3,
        "patterns": [
            {"label": label, "values": row}
            for label, row in zip(["A1", "A2", "A3"], patterns)
        ],
    }
    return vr.parse_model(json.dumps(doc))


def test_classifier_matches_formula():
    # one pattern per class, well separated: a coincident query wins its class
    model = _hand_model([[0.0, 0.0, 0.0], [0.5, 0.5, 0.5], [1.0, 1.0, 1.0]], sigma=0.05)
    result = vr.classify(model, [0.5, 0.5, 0.5])
    assert result.label == vr.Area.A2
    assert result.posterior[1] > 0.99
    assert sum(result.posterior) == pytest.approx(1.0, abs=1e-12)

    # pattern at distance sigma contributes exp(-1/2)
    density = vr.class_density(model, [0.05, 0.0, 0.0], vr.Area.A1)
    assert density == pytest.approx(0.6065306597126334, abs=1e-12)

    # round trip through the document format preserves predictions
    again = vr.parse_model(vr.serialize_model(model))
    assert vr.classify(again, [0.7, 0.1, 0.3]).label == vr.classify(model, [0.7, 0.1, 0.3]).label


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        vr.parse_csv("not a header\n1,2,3\n")
    with pytest.raises(ValueError):
        vr.route_score(vr.AreaDurations(0, 0, 0))
    with pytest.raises(OSError):
        vr.load_csv(tmp_path / "missing.csv")
    with pytest.raises(ValueError):
        vr.compare_routes([vr.RouteCandidate("only", vr.AreaDurations(1, 1, 1))])

"""End-to-end CLI behavior: envelopes, exit codes, determinism.

Every invocation goes through ``main(argv)`` in process; stdout is parsed
back from JSON.  Reports must be byte-identical across repeated runs with
the same inputs, usage problems must exit 2 with a one-line diagnostic on
stderr, and size-cap violations must exit 3.
"""

import json
import math
import os

import pytest

from netfuncomp import cli, netmodel
from netfuncomp.examples import diamond_model, single_edge_model


@pytest.fixture(scope="module")
def paths(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    diamond = base / "diamond.json"
    diamond.write_text(json.dumps(netmodel.model_to_dict(diamond_model())))
    single = base / "single.json"
    single.write_text(json.dumps(netmodel.model_to_dict(single_edge_model())))
    cyclic = base / "cyclic.json"
    doc = netmodel.model_to_dict(diamond_model())
    doc["nodes"].append("v3")
    doc["edges"].append({"id": "e7", "tail": "v1", "head": "v3"})
    doc["edges"].append({"id": "e8", "tail": "v3", "head": "v1"})
    cyclic.write_text(json.dumps(doc))
    broken = base / "broken.json"
    broken.write_text("{not json")
    pentagon = base / "pentagon.json"
    pentagon.write_text(
        json.dumps(
            {
                "vertices": ["a", "b", "c", "d", "e"],
                "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["d", "e"], ["e", "a"]],
                "dist": [0.2] * 5,
            }
        )
    )
    return {
        "diamond": str(diamond),
        "single": str(single),
        "cyclic": str(cyclic),
        "broken": str(broken),
        "pentagon": str(pentagon),
        "base": base,
    }


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_validate_reports_model_shape(capsys, paths):
    rc, out, err = run(capsys, "validate", paths["diamond"])
    assert rc == 0 and err == ""
    doc = json.loads(out)
    assert doc["tool"] == "netfuncomp"
    assert doc["command"] == "validate"
    assert doc["result"]["valid"] is True
    assert doc["result"]["edges"] == 6
    assert doc["result"]["sources"] == ["s1", "s2", "s3"]


def test_broken_json_exits_2(capsys, paths):
    rc, out, err = run(capsys, "validate", paths["broken"])
    assert rc == 2
    assert out == ""
    assert err.startswith("netfuncomp: UsageError:")


def test_cyclic_model_exits_2(capsys, paths):
    rc, _, err = run(capsys, "validate", paths["cyclic"])
    assert rc == 2
    assert err.startswith("netfuncomp: CycleDetected:")


def test_cuts_lists_strong_partitions(capsys, paths):
    rc, out, _ = run(capsys, "cuts", paths["diamond"])
    assert rc == 0
    result = json.loads(out)["result"]
    assert result["count"] == len(result["cut_sets"])
    by_cut = {tuple(c["cut"]): c for c in result["cut_sets"]}
    assert ("e2",) not in by_cut
    sink_cut = by_cut[("e5", "e6")]
    assert sink_cut["global"] is True
    assert sink_cut["i_set"] == ["s1", "s2", "s3"]
    assert sink_cut["strong_partitions"] == [[["e5", "e6"]], [["e5"], ["e6"]]]
    side = by_cut[("e5",)]
    assert side["i_set"] == ["s1"] and side["j_set"] == ["s2"]


def test_classes_with_side_information(capsys, paths):
    rc, out, _ = run(
        capsys, "classes", paths["diamond"], "--i", "s1", "--j", "s2", "--aj", "0"
    )
    assert rc == 0
    result = json.loads(out)["result"]
    assert result["num_classes"] == 2
    assert result["classes"] == [["0"], ["1"]]


def test_chargraph_layers_and_dot_export(capsys, paths):
    dot_dir = str(paths["base"] / "dots")
    rc, out, _ = run(
        capsys,
        "chargraph",
        paths["diamond"],
        "--cut",
        "e5,e6",
        "--blocks",
        "e5/e6",
        "--dot",
        dot_dir,
    )
    assert rc == 0
    result = json.loads(out)["result"]
    assert len(result["graph"]["vertices"]) == 8
    assert len(result["graph"]["edges"]) == 24
    assert result["graph"]["dist"] == [0.125] * 8
    assert result["layer_certificate"]["ok"] is True
    assert os.path.exists(os.path.join(dot_dir, "chargraph_e5_e6_k1.dot"))


def test_chargraph_size_cap_exits_3(capsys, paths):
    rc, _, err = run(
        capsys, "chargraph", paths["diamond"], "--cut", "e5,e6", "--k", "8"
    )
    assert rc == 3
    assert err.startswith("netfuncomp: TooLarge:")


def test_entropy_on_pentagon(capsys, paths):
    rc, out, _ = run(capsys, "entropy", paths["pentagon"])
    assert rc == 0
    result = json.loads(out)["result"]
    assert result["clique_entropy"] == pytest.approx(1.0, abs=1e-9)
    assert result["graph_entropy"] == pytest.approx(math.log2(2.5), abs=1e-9)
    assert result["chromatic_entropy"] == pytest.approx(
        1.0 + math.log2(2.5) - 0.8, abs=1e-9
    )
    assert result["certificate"]["kind"] == "Opaque"


def test_bounds_csv_on_single_edge(capsys, paths):
    rc, out, _ = run(capsys, "bounds", paths["single"], "--csv")
    assert rc == 0
    assert out == "cut,blocks,basic,improved,fixed_length\ne1,e1,1,1,1\n"


def test_bounds_reports_are_byte_identical(capsys, paths):
    rc1, out1, _ = run(capsys, "bounds", paths["diamond"])
    rc2, out2, _ = run(capsys, "bounds", paths["diamond"])
    assert rc1 == rc2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["result"]["basic"] == pytest.approx(
        7 / 4 - (3 / 8) * math.log2(3), abs=1e-12
    )
    assert doc["result"]["witness"]["basic"]["cut"] == ["e5", "e6"]
    assert len(doc["result"]["pairs"]) == 118


def test_threads_env_matches_serial(capsys, paths, monkeypatch):
    rc1, out1, _ = run(capsys, "bounds", paths["single"])
    monkeypatch.setenv("NETFUNC_THREADS", "2")
    rc2, out2, _ = run(capsys, "bounds", paths["single"])
    assert rc1 == rc2 == 0
    assert json.loads(out1)["result"] == json.loads(out2)["result"]
    monkeypatch.setenv("NETFUNC_THREADS", "soon")
    rc3, _, err = run(capsys, "bounds", paths["single"])
    assert rc3 == 2
    assert err.startswith("netfuncomp: UsageError:")


def test_simulate_builtin_scheme(capsys):
    rc, out, _ = run(capsys, "simulate", "--builtin", "diamond", "--k", "2")
    assert rc == 0
    result = json.loads(out)["result"]
    assert result["admissible"] is True
    assert result["max_rate"] == 1.25
    assert result["non_ud_edges"] == []


def test_simulate_code_file(capsys, paths):
    from netfuncomp import codesim

    model = diamond_model()
    code = codesim.huffman_transform(model, codesim.diamond_scheme(2))
    code_path = paths["base"] / "code.json"
    code_path.write_text(json.dumps(codesim.code_to_dict(model, code)))
    rc, out, _ = run(capsys, "simulate", paths["diamond"], "--code", str(code_path))
    assert rc == 0
    assert json.loads(out)["result"]["max_rate"] == 1.25

    ref_path = paths["base"] / "builtin_ref.json"
    ref_path.write_text(json.dumps({"builtin": "diamond", "k": 2}))
    rc, out, _ = run(capsys, "simulate", paths["diamond"], "--code", str(ref_path))
    assert rc == 0
    assert json.loads(out)["result"]["admissible"] is True


def test_simulate_requires_a_code_source(capsys, paths):
    rc, _, err = run(capsys, "simulate", paths["diamond"])
    assert rc == 2
    assert err.startswith("netfuncomp: UsageError:")


def test_example_without_bounds(capsys):
    rc, out, _ = run(capsys, "example", "single-edge")
    assert rc == 0
    doc = json.loads(out)
    assert doc["result"]["model"]["alphabet"] == 2
    assert "bounds" not in doc["result"]


def test_unknown_example_exits_2(capsys):
    rc, _, err = run(capsys, "example", "heptagon")
    assert rc == 2
    assert err.startswith("netfuncomp: UsageError:")


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    out, _ = capsys.readouterr()
    assert out.startswith("netfuncomp ")


def test_pairs_file_restricts_search(capsys, paths):
    pairs_path = paths["base"] / "pairs.json"
    pairs_path.write_text(
        json.dumps([{"cut": ["e5", "e6"], "blocks": [["e5"], ["e6"]]}])
    )
    rc, out, _ = run(
        capsys, "bounds", paths["diamond"], "--pairs", str(pairs_path)
    )
    assert rc == 0
    result = json.loads(out)["result"]
    assert len(result["pairs"]) == 1
    assert result["improved"] == pytest.approx(0.5 * math.log2(5), abs=1e-4)

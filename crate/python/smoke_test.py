"""Smoke test for the nc_hodge extension module."""

import json

import nc_hodge


def main():
    atlas = nc_hodge.Atlas.fixture("triangle")
    assert atlas.ambient_dimension == 2
    assert atlas.validate() == []

    log = atlas.table("log")
    assert [log.betti(k) for k in range(3)] == [1, 2, 1]
    assert log.dim(1, 2, 1, 1) == 2

    pair = atlas.table("xd")
    assert [pair.betti(k) for k in range(5)] == [0, 0, 1, 2, 1]
    assert json.loads(pair.to_json())["complex"] == "xd"

    generic = nc_hodge.Atlas.generic(2, 3)
    assert json.loads(generic.to_json()) == json.loads(atlas.to_json())

    for suite in ("consistency", "fujiki", "les", "cup"):
        report = nc_hodge.verify(suite, atlas)
        assert report.passed, report.to_text()

    logforms = nc_hodge.verify("logforms", seed=42, max_n=2)
    assert logforms.passed and len(logforms) > 0

    passed, generators, failures = nc_hodge.claim_check(3, 2, 1, [1], 2, seed=7)
    assert passed and generators > 0 and failures == []

    try:
        atlas.table("bogus")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown complex accepted")

    print("smoke test ok:", ", ".join(nc_hodge.complexes()))


if __name__ == "__main__":
    main()

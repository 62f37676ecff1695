import json
from pathlib import Path

import numpy as np
import pytest

from supernet_sampler.encoding import ToyBackbone, encode16, sample_arch, validate_arch


def test_shared_golden_vectors_match_bit_exactly():
    # the same fixture ships with the codesign package; both encoders must
    # reproduce these strings exactly
    doc = json.loads((Path(__file__).parent / "data" / "golden_encode16.json").read_text())
    backbone = ToyBackbone()
    for case in doc["cases"]:
        vec = encode16(tuple(case["ratios"]), backbone)
        assert [repr(float(v)) for v in vec] == case["encode16"]


def test_sampled_archs_are_valid_and_padded():
    backbone = ToyBackbone()
    rng = np.random.default_rng(0)
    for _ in range(500):
        ratios = sample_arch(rng, backbone)
        validate_arch(ratios, backbone)
        vec = encode16(ratios, backbone)
        assert vec.shape == (16,)
        assert np.all(vec[backbone.total_cells:] == 0.0)


def test_min_units_enforced():
    backbone = ToyBackbone()
    with pytest.raises(ValueError):
        validate_arch((0.5, 0, 0, 0, 0.5, 0.5, 0, 0), backbone)


def test_skip_before_active_rejected():
    backbone = ToyBackbone()
    with pytest.raises(ValueError):
        validate_arch((0.5, 0, 0.5, 0, 0.5, 0.5, 0, 0), backbone)


def test_off_alphabet_ratio_rejected():
    backbone = ToyBackbone()
    with pytest.raises(ValueError):
        validate_arch((0.6, 0.5, 0, 0, 0.5, 0.5, 0, 0), backbone)


def test_sampling_deterministic_per_seed():
    backbone = ToyBackbone()
    a = [sample_arch(np.random.default_rng(7), backbone) for _ in range(1)]
    b = [sample_arch(np.random.default_rng(7), backbone) for _ in range(1)]
    assert a == b

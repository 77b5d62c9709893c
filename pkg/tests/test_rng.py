from molrew.rng import SplitMix64


def test_splitmix64_reference_vectors():
    # published sequence for seed 0
    rng = SplitMix64(0)
    assert rng.next_u64() == 0xE220A8397B1DCDAF
    assert rng.next_u64() == 0x6E789E6AA1B965F4
    assert rng.next_u64() == 0x06C45D188009454F


def test_splitmix64_seed_sensitivity():
    assert SplitMix64(1).next_u64() != SplitMix64(2).next_u64()
    a, b = SplitMix64(12345), SplitMix64(12345)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]


def test_uniform_range():
    rng = SplitMix64(9)
    for _ in range(1000):
        u = rng.uniform()
        assert 0.0 <= u < 1.0


def test_weighted_order_is_permutation():
    rng = SplitMix64(3)
    order = rng.weighted_order([1.0, 2.0, 3.0, 0.5])
    assert sorted(order) == [0, 1, 2, 3]


def test_weighted_order_zero_weights_last():
    rng = SplitMix64(3)
    order = rng.weighted_order([0.0, 1.0, 0.0, 2.0])
    assert set(order[:2]) == {1, 3}
    assert order[2:] == [0, 2]


def test_weighted_order_respects_bias():
    heavy_first = 0
    for seed in range(400):
        order = SplitMix64(seed).weighted_order([0.05, 1.0])
        heavy_first += order[0] == 1
    assert heavy_first > 300

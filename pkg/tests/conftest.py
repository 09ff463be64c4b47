"""Shared builders for the test suite."""

import pytest

from cetsp.instances import Instance, Sensor


@pytest.fixture
def one_sensor() -> Instance:
    # depot at the origin, one disk centered (10, 0) with radius sqrt(2),
    # so the inscribed square is [9, 11] x [-1, 1]
    return Instance(
        sensors=(Sensor(0, 0.0, 0.0, 0.0), Sensor(1, 10.0, 0.0, 2.0 ** 0.5)),
        name="one",
    )


def make_instance(coords, name="t"):
    """coords: [(x, y, r), ...] with the depot first (r forced to 0)."""
    sensors = [Sensor(0, coords[0][0], coords[0][1], 0.0)]
    for i, (x, y, r) in enumerate(coords[1:], start=1):
        sensors.append(Sensor(i, float(x), float(y), float(r)))
    return Instance(sensors=tuple(sensors), name=name)

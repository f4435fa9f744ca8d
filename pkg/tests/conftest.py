import json

import pytest

from fractal.ifs import AffineIfs, TruncationBudget
from fractal.measure import counting


@pytest.fixture
def mu3() -> AffineIfs:
    return AffineIfs(3, (0, 2))


@pytest.fixture
def mu4() -> AffineIfs:
    return AffineIfs(4, (0, 2))


@pytest.fixture
def mu4p() -> AffineIfs:
    return AffineIfs(4, (0, 1))


@pytest.fixture
def lebesgue_ifs() -> AffineIfs:
    return AffineIfs(2, (0, 1))


@pytest.fixture
def budget() -> TruncationBudget:
    return TruncationBudget(1e-12)


@pytest.fixture(scope="session")
def integers():
    return counting(-10_000, 10_000)


def last_json_line(output: str) -> dict:
    """Le résultat d'une commande est la dernière ligne non vide de stdout"""
    lines = [line for line in output.splitlines() if line.strip()]
    return json.loads(lines[-1])

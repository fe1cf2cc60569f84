import numpy as np
import pytest

from ccqkan.experiments import GridSpec, run_grid
from ccqkan.network import TABLE_CONFIGS
from ccqkan.training import ORIGINAL


@pytest.mark.slow
def test_ideal_training_reduces_loss():
    recs = run_grid(GridSpec(configs=list(TABLE_CONFIGS), models=(ORIGINAL,)))
    for n, d in TABLE_CONFIGS:
        rs = [r for r in recs if (r.n, r.d) == (n, d)]
        assert len(rs) == 16 and not any(r.failed for r in rs)
        improved = sum(r.final_loss <= r.losses[0] for r in rs)
        assert improved >= 14, (n, d, improved)

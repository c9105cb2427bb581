"""Pure-numpy fallback for the lattice stencil, same contract as _kernels."""

import numpy as np


def lattice_apply(ca, cb, oa, ob, j_aa, j_ab, phase):
    """Photon-photon part of H psi on a ring; see _kernels.pyx."""
    oa[:] = -j_aa * (np.roll(ca, 1) + np.roll(ca, -1))
    oa -= j_ab * (cb + phase * np.roll(cb, 1))
    ob[:] = -j_ab * (ca + np.conj(phase) * np.roll(ca, -1))

"""Unit conventions.

Energies are in eV and hbar = 1 internally, so times carry units of 1/eV.
Conversion to femtoseconds happens only at I/O boundaries.
"""

HBAR_EV_FS = 0.6582119569  # eV fs
HBARC_EV_NM = 197.3269804  # eV nm


def fs_to_inv_ev(t_fs):
    return t_fs / HBAR_EV_FS


def inv_ev_to_fs(t):
    return t * HBAR_EV_FS

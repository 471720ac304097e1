"""Exact characters, branching functions and fusion rules for sp_2n, so_2n+1 and osp(1|2n)."""

__version__ = "0.1.0"

"""Build the cone point set, read it as a code and certify it.

Run: python3 demos/cone_code.py [p a n s k]
"""

from __future__ import annotations

import sys

from rankcodes import build_field, c_sigma_t, code_report
from rankcodes.geometry import build_cone_construction, code_from_pointset, verify_construction


def main(argv):
    p, a, n, s, k = (int(v) for v in argv) if argv else (2, 1, 4, 1, 3)
    F = build_field(p, a, n, s)
    checks = verify_construction(F, k, [1])
    print(f"field {F.spec}, k={k}")
    for key in ("embedding", "E_size", "E_exterior_gamma", "K_size", "K_exterior_sigma"):
        print(f"  {key:18s} {checks[key]}")
    K = build_cone_construction(F, k, [1])
    C = code_from_pointset(K, n - k + 1)
    same = (C.enumerate() == c_sigma_t(F, k, [1]).enumerate()).all()
    print(f"  code from cone has {len(C)} words; equals the polynomial description: {bool(same)}")
    rep = code_report(C, flags=False)
    print(f"  min distance {rep['min_distance']}, MRD {rep['is_mrd']}, distribution {rep['distance_distribution']}")


if __name__ == "__main__":
    main(sys.argv[1:])

#!/usr/bin/env python3
# Copyright 2026 The selfnorm Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the 50-digit reference table for the normal CDF and erfc kernels."""
import sys

import mpmath

mpmath.mp.dps = 60


def main(path):
    zs = [mpmath.mpf(-10) + mpmath.mpf(20) * k / 199 for k in range(200)]
    # A few exact-decimal points used by name in the unit tests.
    with open(path, "w") as out:
        out.write("# z  Phi(z)  erfc(z)   (50 significant digits, mpmath dps=60)\n")
        for z in zs:
            # Round z to a double first so the oracle is evaluated at the exact
            # argument the kernel sees.
            zd = mpmath.mpf(float(z))
            phi = mpmath.ncdf(zd)
            erfc = mpmath.erfc(zd)
            out.write("%s %s %s\n" % (repr(float(zd)), mpmath.nstr(phi, 50),
                                      mpmath.nstr(erfc, 50)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "phi_oracle.txt")

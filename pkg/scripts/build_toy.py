"""Build the toy Gamma and final-witness certificates and re-verify them from disk."""
import argparse
from pathlib import Path

from kdist.certificate import Certificate, verify
from kdist.constructions import build_final
from kdist.pipeline import final_certificate, gamma_build, gamma_certificate

TOYS = {
    "toy": dict(N=4),
    "synthetic": dict(n=2, M=2, N=3, T=3),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("toy-certs"))
    ap.add_argument("--r", type=int, default=16)
    ap.add_argument("--k", type=int, default=2)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for label, over in TOYS.items():
        gb = gamma_build(args.r, args.k, **over)
        for kind, cert in (("gamma", gamma_certificate(gb)), ("final-w", final_certificate(build_final(gb)))):
            path = args.out_dir / f"{label}-{kind}.cert"
            cert.save(path)
            res = verify(Certificate.load(path))
            status = "verified" if res.ok else "FAILED"
            print(f"{label:10s} {kind:8s} shape {gb.shape}  {path}  {status}")
            for line in res.fresh.lines():
                print("    " + line)


if __name__ == "__main__":
    main()

"""Entry point: `python -m alp_bridge <estimator>` serves one estimator
over stdin/stdout until shutdown."""

import argparse
import sys

from alp_bridge.registry import ESTIMATORS
from alp_bridge.server import serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="alp-bridge",
        description="Serve a scikit-learn estimator over the alp-bridge/1 protocol",
    )
    parser.add_argument("estimator", choices=sorted(ESTIMATORS))
    args = parser.parse_args(argv)
    return serve(args.estimator)


if __name__ == "__main__":
    sys.exit(main())

import argparse
import subprocess
import sys
from pathlib import Path
from typing import List, Tuple


THIS_DIR = Path(__file__).resolve().parent


def discover_configs() -> List[Path]:
    return sorted(p for p in THIS_DIR.iterdir() if p.is_file() and p.suffix == ".toml")


def launch_runs(configs: List[Path], out_root: Path, parallel: int) -> int:
    if not configs:
        print("No *.toml configs found in", THIS_DIR)
        return 0

    print("Discovered {} configs:".format(len(configs)))
    for c in configs:
        print(" -", c.name)

    out_root.mkdir(parents=True, exist_ok=True)
    pending = list(configs)
    running: List[Tuple[str, subprocess.Popen]] = []
    failed: List[str] = []
    try:
        while pending or running:
            while pending and len(running) < parallel:
                config = pending.pop(0)
                cmd = [sys.executable, "-m", "vexnorm", "run", str(config), "--out", str(out_root / config.stem)]
                print("launching: {}".format(" ".join(cmd)))
                running.append((config.name, subprocess.Popen(cmd)))

            name, proc = running[0]
            if proc.wait() != 0:
                failed.append("{} (exit {})".format(name, proc.returncode))
            running.pop(0)
    except KeyboardInterrupt:
        print("\nCtrl+C received, terminating runs...")
    finally:
        for _, p in running:
            if p.poll() is None:
                p.terminate()

    for name in failed:
        print("failed:", name)
    print("<all runs done>")
    return 1 if failed else 0


def main() -> None:
    parser = argparse.ArgumentParser(description="Run every example config, one OS process per config.")
    parser.add_argument("--parallel", "-p", type=int, default=2, help="Concurrent runs (default: 2)")
    parser.add_argument("--out", "-o", default="./example_runs", help="Root output directory")
    args = parser.parse_args()
    sys.exit(launch_runs(discover_configs(), Path(args.out), max(1, args.parallel)))


if __name__ == "__main__":
    main()

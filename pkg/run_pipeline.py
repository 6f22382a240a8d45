"""Full experiment pipeline: train the nets, sweep, align, report."""
import argparse
import subprocess
import sys
from pathlib import Path

# ANSI colors
GREEN = "\033[92m"
CYAN = "\033[96m"
YELLOW = "\033[93m"
RED = "\033[91m"
RESET = "\033[0m"


def print_header(out: Path):
    print(f"""
{CYAN}============================================================
           crossvote experiment pipeline
           train -> sweep -> align -> report
           output: {out}
============================================================{RESET}
""")


def run_step(label: str, args) -> None:
    """Run one crossvote subcommand; abort the pipeline on failure."""
    print(f"{YELLOW}>>> {label}{RESET}")
    cmd = [sys.executable, "-m", "crossvote"] + [str(a) for a in args]
    proc = subprocess.run(cmd, cwd=Path(__file__).parent)
    if proc.returncode != 0:
        print(f"{RED}ERROR: '{label}' exited with code {proc.returncode}{RESET}")
        sys.exit(proc.returncode)


def main():
    parser = argparse.ArgumentParser(description="Run the full crossvote pipeline")
    parser.add_argument("--out", default="runs/pipeline")
    parser.add_argument("--seed", type=int, default=1, help="training seed")
    parser.add_argument("--seeds", type=int, default=10, help="evaluation seeds per cell")
    parser.add_argument("--episodes", type=int, default=None, help="training episodes per net")
    parser.add_argument("--parallel", type=int, default=1)
    parser.add_argument("--config", default=None)
    args = parser.parse_args()

    out = Path(args.out)
    ckpt = out / "checkpoints"
    sweep_dir = out / "sweep"
    common = ["--checkpoints", ckpt]
    if args.config:
        common += ["--config", args.config]

    print_header(out)
    for reward in ("stops", "wait"):
        train = ["train", "--reward", reward, "--seed", args.seed] + common
        if args.episodes is not None:
            train += ["--episodes", args.episodes]
        run_step(f"Training {reward} net", train)

    run_step("Sweeping demands", [
        "sweep", "--policies", "stops,wait,multi", "--vote-rule", "proportional,majority",
        "--seeds", args.seeds, "--parallel", args.parallel, "--run-dir", sweep_dir,
    ] + common)
    run_step("Alignment analysis", ["align", "--run-dir", sweep_dir] + common)
    run_step("Acceptance report", ["report", "--run-dir", sweep_dir] + common)

    print(f"""
{GREEN}=== Pipeline finished ==={RESET}

{CYAN}Results:{RESET}
  Checkpoints:  {ckpt}
  Sweep:        {sweep_dir}
  Summary:      {sweep_dir / 'acceptance.md'}
""")


if __name__ == "__main__":
    main()

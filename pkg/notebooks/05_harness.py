# %% [markdown]
# # Running experiments from configs
#
# The harness turns a JSON config into a verdict and two artifacts: a JSON
# result and a per-step CSV. The command line wraps the same calls.

# %%
import tempfile
from pathlib import Path

from altiter.config import parse_config
from altiter.harness import emit_csv, emit_json, run_experiment

ROOT = Path(__file__).resolve().parents[1] if "__file__" in globals() else Path.cwd()
config = ROOT / "configs" / "disk_rotation.json"
result = run_experiment(parse_config(config.read_text()))
print("verdict", result.verdict)
for name, check in result.checks.items():
    print(f"{name:14} {'pass' if check['passed'] else 'FAIL'}")

# %%
out = Path(tempfile.mkdtemp())
print(emit_json(result, out / "result.json").read_text()[:400])
print("\n".join(emit_csv(result, out / "series.csv").read_text().splitlines()[:5]))

# %% [markdown]
# From a shell:
#
# ```
# altiter verify configs/rotation.json
# altiter run configs/disk.json --out-dir results
# altiter sweep configs/scaling.json --schedules harmonic,power:0.75,constant:0.5
# ```

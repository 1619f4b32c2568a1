"""
Driving the labeling service
============================

The HTTP facade wraps survey sessions for a human reviewer (the browser
bench in frontend/ consumes exactly these endpoints). This demo drives
one batch in-process through the same ASGI app `satdsurvey serve` runs.
"""

from pathlib import Path

from fastapi.testclient import TestClient

from satdsurvey.datagen import write_benchmark
from satdsurvey.service import create_app

data = Path("demo_output/benchmark")
if not data.exists():
    write_benchmark(data, seed=7)

app = create_app(data, log_dir=Path("demo_output/session_logs"), restore=False)
client = TestClient(app)

created = client.post(
    "/sessions",
    json={"test_project": "columba", "m": 10, "seed": 1, "stop": "target@0.9"},
).json()
sid = created["session_id"]
print("created session:", created)

batch = client.get(f"/sessions/{sid}/batch").json()
print(f"\nbatch {batch['batch_index']}: {len(batch['ids'])} comments; first one:")
print("  ", batch["texts"][0])

# a reviewer would read each card; here we just call everything debt-free
labels = {str(i): False for i in batch["ids"]}
report = client.post(f"/sessions/{sid}/labels", json={"labels": labels}).json()
print("\niteration report:", report)

status = client.get(f"/sessions/{sid}/status").json()
print("\nstatus:", {k: status[k] for k in ("reads", "found", "estimate_total", "status")})
print("session log dir: demo_output/session_logs")

"""Drive a labeling session over HTTP, the way an analyst UI would.

Starts the service in-process, creates a session, then answers each
query with the ground-truth label the server exposes in replay-assist
mode. Uses only the standard library on the client side.
"""

import json
import tempfile
import threading
import time
import urllib.request
from pathlib import Path

import uvicorn

from netal.experiments import cmd_prepare
from netal.service import create_app
from netal.simulate import write_corpus

HOST, PORT = "127.0.0.1", 8731
BASE = f"http://{HOST}:{PORT}"


def call(method, path, body=None):
    data = json.dumps(body).encode() if body is not None else None
    req = urllib.request.Request(
        BASE + path, data=data, method=method,
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read())


workdir = Path(tempfile.mkdtemp(prefix="netal_srv_"))
write_corpus(workdir / "raw.kdd", seed=7, scale=0.03)
cmd_prepare(workdir / "raw.kdd", workdir / "data", split_seed=0)

app = create_app(workdir / "data", workdir / "state")
server = uvicorn.Server(uvicorn.Config(app, host=HOST, port=PORT,
                                       log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.05)

print("datasets:", call("GET", "/health")["datasets"])

doc = call("POST", "/sessions", {
    "dataset": "neptune",
    "learner": "random_forest",
    "strategy": "entropy",
    "seed": 0,
    "n_seed": 25,
    "budget": 8,
})
sid = doc["session_id"]
print(f"session {sid[:8]}: initial dev F1 {doc['initial']['f1']:.3f}")

while doc["status"] == "awaiting_label":
    q = doc["query"]
    flags = ", ".join(f"{e['feature']}={e['weight']:.2f}"
                      for e in q["top_importances"][:3])
    print(f"query {q['query_number']}: row {q['record_index']}"
          f"  p(attack)={q['model_probability']:.2f}  drivers: {flags}")
    doc = call("POST", f"/sessions/{sid}/label", {
        "query_number": q["query_number"],
        "label": q["true_label"],     # the analyst's judgment goes here
    })
    print(f"  -> labeled {q['true_label']}; dev F1 {doc['metrics']['f1']:.3f}")

metrics = call("GET", f"/sessions/{sid}/metrics")
print("\nF1 curve:", [round(f, 3) for _, f in metrics["f1_curve"]])
z = metrics["zscore"]
if z["defined"]:
    named = [(f, v) for f, v in zip(z["features"], z["z"])
             if isinstance(v, (int, float))]
    named.sort(key=lambda t: -t[1])
    shown = ", ".join(f"{f}={v:.1f}" for f, v in named[:3])
    print(f"most separating features of what the model still misses: {shown}")
else:
    print("z-score diagnostic undefined: no dev mispredictions left to explain")
server.should_exit = True
print(f"session state persisted under {workdir / 'state'}")

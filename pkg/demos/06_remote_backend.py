"""Driving the pipeline through the HTTP backend contract.

The client speaks to any service exposing GET /health, POST /train and
POST /predict_proba (the bridge/ package ships a real one). This demo spins
up a tiny in-process stub so it runs standalone.

Run: python demos/06_remote_backend.py
"""
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from silvertrain import RemoteClassifier, SelfTrainConfig, filter_confident, pseudo_label
from silvertrain.corpus import Dataset, Sample


class StubHandler(BaseHTTPRequestHandler):
    def log_message(self, fmt, *args):
        pass

    def _send(self, payload):
        body = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self._send({"status": "ok", "model": "demo-stub"})

    def do_POST(self):
        payload = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        if self.path == "/train":
            self._send({"job": "demo", "status": "completed", "best_macro_f1": 0.97})
        else:
            probs = [0.999 if "sure" in t else 0.5 for t in payload["texts"]]
            self._send({"probs": probs})


server = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
threading.Thread(target=server.serve_forever, daemon=True).start()
url = f"http://127.0.0.1:{server.server_address[1]}"
print("stub serving at", url)

client = RemoteClassifier(url)
print("health:", client.health())

# The client validates the contract: order/length preservation and [0, 1]
# probabilities; a misbehaving server raises RemoteBackendError.
pool = Dataset(
    (Sample("p1", "sure thing"), Sample("p2", "hmm uncertain"), Sample("p3", "sure again")),
    "pool",
)
preds = pseudo_label(client, pool)
print("pool probabilities:", preds)
silver = filter_confident(preds, SelfTrainConfig(), round_number=1)
print("silver records:", [(r.id, r.assigned) for r in silver])

server.shutdown()

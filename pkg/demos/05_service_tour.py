"""The HTTP service, end to end over a real socket.

Starts the service on a local port, creates a session, posts a brush and
a pin, reads the faceted view document and the conditional histogram, and
downloads the export: the same loop the web client drives.
"""

import json
import threading
import time
import urllib.request

import uvicorn

from jobgrid import default_scenario, generate_synthetic, resolve_config
from jobgrid.service import create_app

PORT = 8791
BASE = f"http://127.0.0.1:{PORT}"

table = generate_synthetic(default_scenario(seed=7))
config = resolve_config(None, table.schema)
server = uvicorn.Server(
    uvicorn.Config(create_app(table, config), host="127.0.0.1", port=PORT, log_level="error")
)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.02)


def get(path):
    with urllib.request.urlopen(BASE + path) as response:
        body = response.read().decode()
        return json.loads(body) if body.startswith("{") else body


def post(path, payload):
    request = urllib.request.Request(
        BASE + path, json.dumps(payload).encode(), {"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read())


meta = get("/meta")
print(f"service is up: {meta['rows']} rows, facets {meta['facets']}")

session = post("/sessions", {})
sid = session["session_id"]
print(f"session {sid} at revision {session['revision']}")

result = post(f"/sessions/{sid}/mutations",
              {"op": "set_brush", "facet": "short", "y_range": [0, 300]})
print(f"brush posted -> revision {result['revision']}, "
      f"{result['selected_count']} selected")

result = post(f"/sessions/{sid}/mutations", {"op": "pin", "label": "u0001"})
print(f"pin posted   -> revision {result['revision']}, "
      f"{result['selected_count']} selected")

views = get(f"/sessions/{sid}/views")
for facet in views["facets"]:
    legend = facet["legend"]
    print(f"  {facet['facet']:<10} scope={facet['scope_count']:>6} "
          f"selected={legend['selected_count']:>5} "
          f"color extents=[{legend['color_min']}, {legend['color_max']}]")

hist = get(f"/sessions/{sid}/facets/short/columns/0/y-histogram")
print(f"conditional histogram for short/column 0 sums to {sum(hist['counts'])}")

export = get(f"/sessions/{sid}/export")
print(f"export download: {len(export.splitlines())} lines, "
      f"starts with {export.splitlines()[0]!r}")

server.should_exit = True
thread.join(timeout=5)
print("server stopped")

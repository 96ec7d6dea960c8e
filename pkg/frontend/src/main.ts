// Entry point: mount the app against the service base URL. When served
// by `sizedepth serve --ui-dir`, the API is same-origin; a dev server
// can point elsewhere with ?api=http://127.0.0.1:8008.

import { Client } from "./api.js";
import { App } from "./app.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
new App(root, new Client(base));

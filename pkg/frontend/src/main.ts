import { ApiClient } from "./api.js";
import { Explorer } from "./app.js";
import { decodeState } from "./state.js";

function baseUrl(): string {
  const meta = document.querySelector('meta[name="rvss-base"]');
  const fromMeta = meta?.getAttribute("content");
  if (fromMeta) return fromMeta.replace(/\/$/, "");
  return "http://localhost:8000";
}

const root = document.getElementById("explorer");
if (root) {
  const explorer = new Explorer(root, new ApiClient(baseUrl()));
  void explorer.bootstrap(decodeState(window.location.search));
}

// Explorer state and its URL encoding. The visible view (term + ordered
// minus chips) is fully reproducible from the query string, so any state is
// shareable and survives a reload.

export interface ExplorerState {
  term: string | null;
  minus: string[];
}

export const EMPTY_STATE: ExplorerState = { term: null, minus: [] };

export function encodeState(state: ExplorerState): string {
  if (!state.term) return "";
  const qs = new URLSearchParams();
  qs.set("term", state.term);
  if (state.minus.length > 0) qs.set("minus", state.minus.join(","));
  return `?${qs.toString()}`;
}

export function decodeState(search: string): ExplorerState {
  const qs = new URLSearchParams(search);
  const term = qs.get("term");
  if (!term) return { ...EMPTY_STATE };
  const minus = (qs.get("minus") ?? "")
    .split(",")
    .map((t) => t.trim())
    .filter((t) => t.length > 0 && t !== term);
  return { term, minus: dedupe(minus) };
}

function dedupe(terms: string[]): string[] {
  return [...new Set(terms)];
}

export function selectTerm(term: string): ExplorerState {
  // a fresh selection always starts without chips
  return { term, minus: [] };
}

export function addChip(state: ExplorerState, term: string): ExplorerState {
  if (!state.term || term === state.term || state.minus.includes(term)) {
    return state;
  }
  return { term: state.term, minus: [...state.minus, term] };
}

export function removeChip(state: ExplorerState, term: string): ExplorerState {
  return { term: state.term, minus: state.minus.filter((t) => t !== term) };
}

export function moveChip(
  state: ExplorerState,
  term: string,
  direction: -1 | 1,
): ExplorerState {
  const idx = state.minus.indexOf(term);
  const target = idx + direction;
  if (idx < 0 || target < 0 || target >= state.minus.length) return state;
  const minus = [...state.minus];
  [minus[idx], minus[target]] = [minus[target], minus[idx]];
  return { term: state.term, minus };
}

// The explorer view: search-as-you-type term selection, a ranked neighbor
// table, cluster panels, and removable/reorderable subtraction chips driving
// the iterative homonym-separation workflow.
//
// Concurrency model: one in-flight view request; every user action bumps a
// sequence number and aborts the previous fetch, so the tables always show
// the last completed request (last write wins, no interleaved renders).

import { ApiClient, ApiError, ClusterSet, NeighborList } from "./api.js";
import {
  EMPTY_STATE,
  ExplorerState,
  addChip,
  encodeState,
  moveChip,
  removeChip,
  selectTerm,
} from "./state.js";

export interface ExplorerOptions {
  k?: number;
  suggestLimit?: number;
  syncUrl?: (state: ExplorerState) => void;
}

function defaultSyncUrl(state: ExplorerState): void {
  const encoded = encodeState(state);
  window.history.replaceState(null, "", encoded === "" ? window.location.pathname : encoded);
}

export class Explorer {
  private state: ExplorerState = { ...EMPTY_STATE };
  private seq = 0;
  private suggestSeq = 0;
  private abortCtl: AbortController | null = null;

  private neighborsData: NeighborList | null = null;
  private clustersData: ClusterSet | null = null;
  private checksum = "";
  private loading = false;

  private readonly k: number;
  private readonly suggestLimit: number;
  private readonly syncUrl: (state: ExplorerState) => void;

  private readonly searchInput: HTMLInputElement;
  private readonly suggestionsEl: HTMLUListElement;
  private readonly bannerEl: HTMLElement;
  private readonly chipsEl: HTMLElement;
  private readonly statusEl: HTMLElement;
  private readonly neighborsEl: HTMLElement;
  private readonly clustersEl: HTMLElement;
  private readonly checksumEl: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    options: ExplorerOptions = {},
  ) {
    this.k = options.k ?? 100;
    this.suggestLimit = options.suggestLimit ?? 20;
    this.syncUrl = options.syncUrl ?? defaultSyncUrl;

    root.innerHTML = `
      <header class="explorer-header">
        <input class="search" type="text" autocomplete="off"
               placeholder="type a term, e.g. barde" aria-label="search terms" />
        <ul class="suggestions"></ul>
      </header>
      <div class="banner" hidden></div>
      <div class="chips"></div>
      <div class="status"></div>
      <main class="panes">
        <section class="neighbors-pane">
          <h2 class="pane-title"></h2>
          <table class="neighbors"><tbody></tbody></table>
        </section>
        <section class="clusters-pane">
          <h2>clusters</h2>
          <div class="clusters"></div>
        </section>
      </main>
      <footer class="checksum"></footer>
    `;
    this.searchInput = root.querySelector(".search") as HTMLInputElement;
    this.suggestionsEl = root.querySelector(".suggestions") as HTMLUListElement;
    this.bannerEl = root.querySelector(".banner") as HTMLElement;
    this.chipsEl = root.querySelector(".chips") as HTMLElement;
    this.statusEl = root.querySelector(".status") as HTMLElement;
    this.neighborsEl = root.querySelector(".neighbors tbody") as HTMLElement;
    this.clustersEl = root.querySelector(".clusters") as HTMLElement;
    this.checksumEl = root.querySelector(".checksum") as HTMLElement;

    this.searchInput.addEventListener("input", () => {
      void this.onSearchInput(this.searchInput.value);
    });
  }

  getState(): ExplorerState {
    return { term: this.state.term, minus: [...this.state.minus] };
  }

  async bootstrap(state: ExplorerState): Promise<void> {
    if (!state.term) return;
    this.state = { term: state.term, minus: [...state.minus] };
    this.syncUrl(this.state);
    await this.refresh();
  }

  async onSearchInput(raw: string): Promise<void> {
    const prefix = raw.trim();
    const token = ++this.suggestSeq;
    if (prefix === "") {
      this.renderSuggestions([]); // no request for an empty prefix
      return;
    }
    try {
      const terms = await this.api.terms(prefix, this.suggestLimit);
      if (token === this.suggestSeq) this.renderSuggestions(terms);
    } catch (err) {
      if (token === this.suggestSeq) this.showError(err);
    }
  }

  async select(term: string): Promise<void> {
    this.renderSuggestions([]);
    this.searchInput.value = term;
    this.state = selectTerm(term); // chips cleared on a fresh selection
    this.syncUrl(this.state);
    await this.refresh();
  }

  async subtract(term: string): Promise<void> {
    const previous = this.state;
    const next = addChip(this.state, term);
    if (next === this.state) return; // query term or duplicate: no-op
    this.state = next;
    this.syncUrl(this.state);
    const rejected = await this.refresh();
    if (rejected instanceof ApiError && rejected.status === 422) {
      // dependent subtrahend: the server names the term; drop the chip
      this.state = previous;
      this.syncUrl(this.state);
      this.renderChips();
    }
  }

  async unsubtract(term: string): Promise<void> {
    const next = removeChip(this.state, term);
    if (next.minus.length === this.state.minus.length) return;
    this.state = next;
    this.syncUrl(this.state);
    await this.refresh();
  }

  async reorder(term: string, direction: -1 | 1): Promise<void> {
    const next = moveChip(this.state, term, direction);
    if (next === this.state) return;
    this.state = next;
    this.syncUrl(this.state);
    // ranking is order-invariant; the re-request only updates score display
    await this.refresh();
  }

  /** Fetch neighbors and clusters for the current state; render only if this
   * request is still the newest one. Resolves to the error when the request
   * failed (callers decide whether to roll back). */
  private async refresh(): Promise<unknown> {
    if (!this.state.term) return null;
    const token = ++this.seq;
    this.abortCtl?.abort();
    const ctl = new AbortController();
    this.abortCtl = ctl;
    this.loading = true;
    this.renderStatus();
    this.renderChips();
    try {
      const [neighbors, clusters] = await Promise.all([
        this.api.neighbors(this.state.term, this.k, this.state.minus, ctl.signal),
        this.api.clusters(this.state.term, this.state.minus, ctl.signal),
      ]);
      if (token !== this.seq) return null; // a newer request superseded this one
      this.neighborsData = neighbors;
      this.clustersData = clusters;
      this.checksum = neighbors.checksum;
      this.loading = false;
      this.hideBanner();
      this.renderAll();
      return null;
    } catch (err) {
      if (token !== this.seq) return null;
      this.loading = false;
      this.renderStatus();
      this.showError(err); // prior tables stay intact
      return err;
    }
  }

  // rendering ----------------------------------------------------------

  private renderAll(): void {
    this.renderStatus();
    this.renderChips();
    this.renderNeighbors();
    this.renderClusters();
    this.checksumEl.textContent = this.checksum === "" ? "" : `snapshot ${this.checksum}`;
  }

  private renderSuggestions(terms: string[]): void {
    this.suggestionsEl.innerHTML = "";
    for (const term of terms) {
      const li = document.createElement("li");
      li.textContent = term;
      li.className = "suggestion";
      li.addEventListener("click", () => void this.select(term));
      this.suggestionsEl.appendChild(li);
    }
  }

  private renderStatus(): void {
    this.statusEl.textContent = this.loading ? "loading…" : "";
  }

  private renderChips(): void {
    this.chipsEl.innerHTML = "";
    for (const term of this.state.minus) {
      const chip = document.createElement("span");
      chip.className = "chip";
      chip.dataset.term = term;

      const label = document.createElement("span");
      label.className = "chip-label";
      label.textContent = `− ${term}`;
      chip.appendChild(label);

      const left = document.createElement("button");
      left.className = "chip-left";
      left.textContent = "◀";
      left.title = "subtract earlier";
      left.addEventListener("click", () => void this.reorder(term, -1));
      chip.appendChild(left);

      const right = document.createElement("button");
      right.className = "chip-right";
      right.textContent = "▶";
      right.title = "subtract later";
      right.addEventListener("click", () => void this.reorder(term, 1));
      chip.appendChild(right);

      const remove = document.createElement("button");
      remove.className = "chip-remove";
      remove.textContent = "×";
      remove.title = `stop subtracting ${term}`;
      remove.addEventListener("click", () => void this.unsubtract(term));
      chip.appendChild(remove);

      this.chipsEl.appendChild(chip);
    }
  }

  private renderNeighbors(): void {
    const title = this.root.querySelector(".pane-title") as HTMLElement;
    const data = this.neighborsData;
    this.neighborsEl.innerHTML = "";
    if (!data) {
      title.textContent = "";
      return;
    }
    const subtracted =
      data.subtracted_terms.length > 0 ? ` ⊥ ${data.subtracted_terms.join(", ")}` : "";
    title.textContent = `neighbors of ${data.query_term}${subtracted}`;
    data.entries.forEach((entry, i) => {
      const tr = document.createElement("tr");
      tr.dataset.term = entry.term;

      const rank = document.createElement("td");
      rank.className = "rank";
      rank.textContent = String(i + 1);
      tr.appendChild(rank);

      const sim = document.createElement("td");
      sim.className = "sim";
      // exactly the server's value, three decimals, no recomputation
      sim.textContent = entry.similarity.toFixed(3);
      tr.appendChild(sim);

      const term = document.createElement("td");
      term.className = "term";
      term.textContent = entry.term;
      tr.appendChild(term);

      const action = document.createElement("td");
      if (entry.term !== this.state.term) {
        const btn = document.createElement("button");
        btn.className = "subtract";
        btn.textContent = "⊥";
        btn.title = `subtract the ${entry.term} sense`;
        btn.addEventListener("click", () => void this.subtract(entry.term));
        action.appendChild(btn);
      }
      tr.appendChild(action);

      this.neighborsEl.appendChild(tr);
    });
  }

  private renderClusters(): void {
    this.clustersEl.innerHTML = "";
    const data = this.clustersData;
    if (!data) return;
    for (const cluster of data.clusters) {
      const panel = document.createElement("div");
      panel.className = "cluster-panel";

      const head = document.createElement("h3");
      head.textContent = `${cluster.centroid_similarity.toFixed(3)}  ${cluster.label.join(", ")}`;
      panel.appendChild(head);

      const list = document.createElement("ul");
      for (const member of cluster.members) {
        const li = document.createElement("li");
        li.textContent = `${member.similarity.toFixed(3)} ${member.term}`;
        list.appendChild(li);
      }
      panel.appendChild(list);
      this.clustersEl.appendChild(panel);
    }
  }

  private showError(err: unknown): void {
    const message = err instanceof Error ? err.message : String(err);
    this.bannerEl.textContent = message;
    this.bannerEl.hidden = false;
  }

  private hideBanner(): void {
    this.bannerEl.hidden = true;
    this.bannerEl.textContent = "";
  }
}

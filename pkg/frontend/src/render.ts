import type { SessionController } from "./session";
import { formatScore, incompleteItems, paginate } from "./report";
import type { TaskReport } from "./types";

function el(
  doc: Document,
  tag: string,
  className: string,
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface SessionHandlers {
  onSubmit(value: number): void;
  onRetry(): void;
}

/** Render the scoring screen for the controller's current state into
 * `root` (replacing its contents). Only the current view is rendered;
 * a reference block exists in the DOM iff the service sent phase 2. */
export function renderSession(
  root: HTMLElement,
  session: SessionController,
  handlers: SessionHandlers,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  if (session.banner) {
    const banner = el(doc, "div", `banner banner-${session.banner.kind}`);
    banner.appendChild(el(doc, "span", "banner-text", session.banner.text));
    if (session.banner.retryable) {
      const retry = el(doc, "button", "retry", "Retry") as HTMLButtonElement;
      retry.addEventListener("click", () => handlers.onRetry());
      banner.appendChild(retry);
    }
    root.appendChild(banner);
  }

  const view = session.view;
  if (!view) return;

  if (view.phase === "DONE") {
    root.appendChild(
      el(doc, "p", "done", "All items scored in both phases. Thank you!"),
    );
    return;
  }

  const header = el(doc, "div", "phase-header");
  header.appendChild(
    el(
      doc,
      "h2",
      "phase-title",
      view.phase === "P1"
        ? "Phase 1 — score the translation on its own"
        : "Phase 2 — score again with the reference",
    ),
  );
  if (session.progress) {
    const done =
      view.phase === "P1" ? session.progress.P1 : session.progress.P2;
    header.appendChild(
      el(doc, "span", "progress", `${done} / ${session.progress.total} scored`),
    );
  }
  root.appendChild(header);

  const card = el(doc, "div", "item-card");
  card.appendChild(el(doc, "h3", "field-label", "Source"));
  card.appendChild(el(doc, "p", "source-text", view.source));
  card.appendChild(el(doc, "h3", "field-label", "Prediction"));
  card.appendChild(el(doc, "p", "prediction-text", view.prediction));
  if (view.phase === "P2") {
    card.appendChild(el(doc, "h3", "field-label", "Reference"));
    card.appendChild(el(doc, "p", "reference-text", view.reference));
    card.appendChild(
      el(doc, "p", "frozen-t", `Your phase-1 score: ${view.t.toFixed(2)}`),
    );
  }
  root.appendChild(card);

  const controls = el(doc, "div", "score-controls");
  const slider = el(doc, "input", "score-slider") as HTMLInputElement;
  slider.type = "range";
  slider.min = "0";
  slider.max = "1";
  slider.step = "0.01";
  slider.value = "0.5";
  const readout = el(doc, "span", "score-readout", "0.50");
  slider.addEventListener("input", () => {
    readout.textContent = Number(slider.value).toFixed(2);
  });
  const submit = el(doc, "button", "submit", "Submit score") as HTMLButtonElement;
  submit.addEventListener("click", () => handlers.onSubmit(Number(slider.value)));
  controls.append(slider, readout, submit);
  root.appendChild(controls);
}

export interface ReportHandlers {
  onPage(page: number): void;
}

/** Render the report table into `root`. Every figure is the service's
 * own value — the UI performs no aggregation of its own. */
export function renderReport(
  root: HTMLElement,
  report: TaskReport,
  page: number,
  handlers: ReportHandlers,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  root.appendChild(el(doc, "h2", "report-title", `Task ${report.task}`));
  const meta = el(doc, "p", "report-meta");
  meta.textContent =
    `alpha = ${report.alpha} · status ${report.status} · ` +
    `task CMS: ${formatScore(report.task_cms)}`;
  root.appendChild(meta);

  if (report.items.length === 0) {
    root.appendChild(el(doc, "p", "empty-state", "This task has no items."));
    return;
  }

  const missing = incompleteItems(report);
  if (missing.length > 0) {
    root.appendChild(
      el(
        doc,
        "div",
        "banner banner-warning",
        `${missing.length} item(s) not yet scored by every annotator; their CMS is pending.`,
      ),
    );
  }

  const view = paginate(report, page);
  const table = el(doc, "table", "report-table") as HTMLTableElement;
  const head = doc.createElement("tr");
  for (const label of ["Item", ...report.annotators, "CMS", "Coverage"]) {
    head.appendChild(el(doc, "th", "col-header", label));
  }
  table.appendChild(head);
  for (const item of view.rows) {
    const row = doc.createElement("tr");
    row.className = item.complete ? "item-row" : "item-row partial";
    row.appendChild(el(doc, "td", "item-id", item.item));
    for (const annotator of report.annotators) {
      const total = item.t_total[annotator];
      row.appendChild(
        el(doc, "td", "t-total", total === undefined ? "—" : formatScore(total)),
      );
    }
    row.appendChild(el(doc, "td", "item-cms", formatScore(item.cms)));
    const covered = report.annotators.filter(
      (a) => item.coverage[a]?.P1 && item.coverage[a]?.P2,
    ).length;
    row.appendChild(
      el(doc, "td", "coverage", `${covered}/${report.annotators.length}`),
    );
    table.appendChild(row);
  }
  root.appendChild(table);

  if (view.pageCount > 1) {
    const nav = el(doc, "div", "pager");
    const prev = el(doc, "button", "pager-prev", "Prev") as HTMLButtonElement;
    prev.disabled = view.page === 0;
    prev.addEventListener("click", () => handlers.onPage(view.page - 1));
    const next = el(doc, "button", "pager-next", "Next") as HTMLButtonElement;
    next.disabled = view.page === view.pageCount - 1;
    next.addEventListener("click", () => handlers.onPage(view.page + 1));
    nav.append(
      prev,
      el(doc, "span", "pager-pos", `page ${view.page + 1} / ${view.pageCount}`),
      next,
    );
    root.appendChild(nav);
  }
}

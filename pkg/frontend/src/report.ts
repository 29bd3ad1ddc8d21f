import type { ItemReport, TaskReport } from "./types";

/** Pagination over report rows. Values are passed through untouched:
 * every number shown comes from the service payload, so slicing pages
 * can never change a total. */
export interface ReportPage {
  rows: ItemReport[];
  page: number;
  pageCount: number;
  pageSize: number;
}

export const DEFAULT_PAGE_SIZE = 25;

export function paginate(
  report: TaskReport,
  page: number,
  pageSize: number = DEFAULT_PAGE_SIZE,
): ReportPage {
  const pageCount = Math.max(1, Math.ceil(report.items.length / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    rows: report.items.slice(clamped * pageSize, (clamped + 1) * pageSize),
    page: clamped,
    pageCount,
    pageSize,
  };
}

/** Format a service-provided score for display without altering its
 * value semantics (null = not yet covered). */
export function formatScore(value: number | null): string {
  return value === null ? "—" : value.toFixed(4);
}

/** Items with missing annotator coverage, for the partial-coverage
 * warning. */
export function incompleteItems(report: TaskReport): ItemReport[] {
  return report.items.filter((item) => !item.complete);
}

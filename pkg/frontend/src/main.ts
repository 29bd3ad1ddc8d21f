import { CmsApiClient } from "./api";
import { renderReport, renderSession } from "./render";
import { SessionController } from "./session";

/** Browser entry point. URL parameters select the mode:
 *    ?task=ID&annotator=NAME   scoring session
 *    ?task=ID&view=report      report table
 */
export async function boot(root: HTMLElement, location: Location): Promise<void> {
  const params = new URLSearchParams(location.search);
  const taskId = params.get("task");
  const doc = root.ownerDocument;
  if (!taskId) {
    root.textContent =
      "Missing ?task=<id> — create a task via the CLI or API first.";
    return;
  }
  const api = new CmsApiClient("");

  if (params.get("view") === "report") {
    let page = 0;
    const draw = async () => {
      const report = await api.getReport(taskId);
      renderReport(root, report, page, {
        onPage(next) {
          page = next;
          void draw();
        },
      });
    };
    await draw();
    return;
  }

  const annotator = params.get("annotator");
  if (!annotator) {
    root.textContent = "Missing ?annotator=<name>.";
    return;
  }
  const session = new SessionController(api, taskId, annotator);
  const draw = () =>
    renderSession(root, session, {
      async onSubmit(value) {
        await session.submit(value);
        draw();
      },
      async onRetry() {
        await session.retry();
        draw();
      },
    });
  doc.defaultView?.addEventListener("online", () => {
    void session.retry().then(draw);
  });
  await session.refresh();
  draw();
}

declare const document: Document;
if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot(
    document.getElementById("app") as HTMLElement,
    document.defaultView!.location,
  );
}

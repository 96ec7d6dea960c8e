// Application shell: upload form, grid overlay, per-patch size editor,
// hyperparameter sliders, solve button, and the depth preview pane.
// One label -> solve -> inspect -> relabel loop, no page reloads.

import { ApiError, Client } from "./api.js";
import { renderGrid } from "./grid.js";
import {
  buildDoc,
  formatValue,
  initialState,
  labeledEntries,
  patchKey,
  previewIsStale,
  setEntry,
  sliderToValue,
  type ViewState,
} from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  readonly state: ViewState = initialState();
  private readonly ids = { rows: 7, cols: 7 };

  // static skeleton nodes
  private banner!: HTMLDivElement;
  private bannerText!: HTMLSpanElement;
  private retryButton!: HTMLButtonElement;
  private uploadSection!: HTMLElement;
  private fileInput!: HTMLInputElement;
  private rowsInput!: HTMLInputElement;
  private colsInput!: HTMLInputElement;
  private workspace!: HTMLElement;
  private photo!: HTMLImageElement;
  private gridContainer!: HTMLDivElement;
  private editorTitle!: HTMLElement;
  private sizeInput!: HTMLInputElement;
  private extentInput!: HTMLInputElement;
  private lambdaSlider!: HTMLInputElement;
  private lambdaValue!: HTMLOutputElement;
  private betaSlider!: HTMLInputElement;
  private betaValue!: HTMLOutputElement;
  private solveButton!: HTMLButtonElement;
  private fieldError!: HTMLDivElement;
  private preview!: HTMLImageElement;
  private previewEmpty!: HTMLParagraphElement;
  private staleBadge!: HTMLSpanElement;
  private solveStats!: HTMLDivElement;

  private lastFailedAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client,
  ) {
    this.buildSkeleton();
    this.render();
  }

  private buildSkeleton(): void {
    this.root.textContent = "";

    this.banner = el("div", "banner hidden");
    this.bannerText = el("span", "banner-text");
    this.retryButton = el("button", "retry", "Retry");
    this.retryButton.type = "button";
    this.retryButton.addEventListener("click", () => void this.retry());
    this.banner.append(this.bannerText, this.retryButton);

    // upload form
    this.uploadSection = el("section", "upload");
    const uploadLabel = el("label", undefined, "Image (PNG or JPEG): ");
    this.fileInput = el("input");
    this.fileInput.type = "file";
    this.fileInput.accept = "image/png,image/jpeg";
    uploadLabel.appendChild(this.fileInput);
    this.rowsInput = el("input", "grid-dim");
    this.rowsInput.type = "number";
    this.rowsInput.min = "1";
    this.rowsInput.value = String(this.ids.rows);
    this.colsInput = el("input", "grid-dim");
    this.colsInput.type = "number";
    this.colsInput.min = "1";
    this.colsInput.value = String(this.ids.cols);
    const gridLabel = el("label", undefined, "Grid: ");
    gridLabel.append(this.rowsInput, document.createTextNode(" x "), this.colsInput);
    const uploadButton = el("button", "start", "Start session");
    uploadButton.type = "button";
    uploadButton.addEventListener("click", () => {
      const file = this.fileInput.files?.[0];
      if (file) void this.uploadImage(file);
    });
    this.uploadSection.append(uploadLabel, gridLabel, uploadButton);

    // workspace: image + overlay on the left, controls and preview right
    this.workspace = el("section", "workspace hidden");
    const imagePane = el("div", "image-pane");
    this.photo = el("img", "photo");
    this.photo.alt = "uploaded image";
    this.gridContainer = el("div", "grid-container");
    imagePane.append(this.photo, this.gridContainer);

    const panel = el("div", "panel");
    this.editorTitle = el("h3", "editor-title", "Select a patch");
    const sizeLabel = el("label", undefined, "Size (m): ");
    this.sizeInput = el("input", "size-input");
    this.sizeInput.type = "number";
    this.sizeInput.min = "0.01";
    this.sizeInput.step = "0.01";
    this.sizeInput.disabled = true;
    sizeLabel.appendChild(this.sizeInput);
    const advanced = el("details", "advanced");
    advanced.appendChild(el("summary", undefined, "Extent (px, optional)"));
    const extentLabel = el("label", undefined, "Pixel extent: ");
    this.extentInput = el("input", "extent-input");
    this.extentInput.type = "number";
    this.extentInput.min = "1";
    this.extentInput.step = "1";
    this.extentInput.disabled = true;
    extentLabel.appendChild(this.extentInput);
    advanced.appendChild(extentLabel);
    this.sizeInput.addEventListener("input", () => this.applyEntry());
    this.extentInput.addEventListener("input", () => this.applyEntry());

    const lambdaRow = el("div", "slider-row");
    const lambdaLabel = el("label", undefined, "lambda ");
    this.lambdaSlider = el("input", "lambda-slider");
    this.lambdaSlider.type = "range";
    this.lambdaSlider.min = "0";
    this.lambdaSlider.max = "100";
    this.lambdaSlider.value = String(this.state.lambdaSlider);
    this.lambdaValue = el("output", "lambda-value");
    this.lambdaSlider.addEventListener("input", () => {
      this.state.lambdaSlider = Number(this.lambdaSlider.value);
      this.render();
    });
    lambdaLabel.appendChild(this.lambdaSlider);
    lambdaRow.append(lambdaLabel, this.lambdaValue);

    const betaRow = el("div", "slider-row");
    const betaLabel = el("label", undefined, "beta ");
    this.betaSlider = el("input", "beta-slider");
    this.betaSlider.type = "range";
    this.betaSlider.min = "0";
    this.betaSlider.max = "100";
    this.betaSlider.value = String(this.state.betaSlider);
    this.betaValue = el("output", "beta-value");
    this.betaSlider.addEventListener("input", () => {
      this.state.betaSlider = Number(this.betaSlider.value);
      this.render();
    });
    betaLabel.appendChild(this.betaSlider);
    betaRow.append(betaLabel, this.betaValue);

    this.solveButton = el("button", "solve", "Solve");
    this.solveButton.type = "button";
    this.solveButton.addEventListener("click", () => void this.submitAndSolve());
    this.fieldError = el("div", "field-error hidden");
    this.fieldError.setAttribute("role", "alert");

    const previewPane = el("div", "preview-pane");
    this.staleBadge = el("span", "stale-badge hidden", "stale");
    this.preview = el("img", "preview hidden");
    this.preview.alt = "depth preview";
    this.previewEmpty = el("p", "preview-empty", "No depth map yet.");
    this.solveStats = el("div", "solve-stats");
    previewPane.append(this.staleBadge, this.preview, this.previewEmpty, this.solveStats);

    panel.append(
      this.editorTitle,
      sizeLabel,
      advanced,
      lambdaRow,
      betaRow,
      this.solveButton,
      this.fieldError,
    );
    this.workspace.append(imagePane, panel, previewPane);
    this.root.append(this.banner, this.uploadSection, this.workspace);
  }

  get lambda(): number {
    return sliderToValue(this.state.lambdaSlider);
  }

  get beta(): number {
    return sliderToValue(this.state.betaSlider);
  }

  async uploadImage(file: Blob, rows?: number, cols?: number): Promise<void> {
    const r = rows ?? Number(this.rowsInput.value);
    const c = cols ?? Number(this.colsInput.value);
    try {
      const info = await this.client.createSession(file, r, c);
      this.state.info = info;
      this.state.sessionRevision = info.revision;
      this.state.entries.clear();
      this.state.selected = null;
      this.state.solve = null;
      this.state.solveRevision = -1;
      this.state.dirty = false;
      this.state.banner = null;
      // jsdom has no object URLs; the overlay works without the photo
      if (typeof URL.createObjectURL === "function") {
        this.photo.src = URL.createObjectURL(file);
      }
    } catch (err) {
      this.fail(err, () => this.uploadImage(file, r, c));
    }
    this.render();
  }

  selectPatch(row: number, col: number): void {
    this.state.selected = { row, col };
    const entry = this.state.entries.get(patchKey(row, col));
    this.sizeInput.value = entry?.size ?? "";
    this.extentInput.value = entry?.extent ?? "";
    this.render();
    this.sizeInput.focus();
  }

  private applyEntry(): void {
    const selected = this.state.selected;
    if (!selected) return;
    setEntry(this.state, selected.row, selected.col, {
      size: this.sizeInput.value,
      extent: this.extentInput.value,
    });
    this.render();
  }

  async submitAndSolve(): Promise<void> {
    if (this.state.inFlight || !this.state.info) return;
    const doc = buildDoc(this.state);
    if (!doc) {
      this.state.fieldError = "Label at least one patch before solving.";
      this.render();
      return;
    }
    this.state.inFlight = true;
    this.state.fieldError = null;
    this.render();
    try {
      const id = this.state.info.session_id;
      const put = await this.client.putAnnotations(id, doc);
      this.state.sessionRevision = put.revision;
      this.state.dirty = false;
      const solve = await this.client.solve(id, this.lambda, this.beta);
      this.state.solve = solve;
      this.state.solveRevision = solve.revision;
      this.state.banner = null;
      this.preview.src = this.client.previewUrl(solve.png_url, solve.revision);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.state.fieldError = err.field ? `${err.field}: ${err.message}` : err.message;
      } else if (err instanceof ApiError && err.status === 409) {
        this.state.fieldError = "Label at least one patch before solving.";
      } else {
        this.fail(err, () => this.submitAndSolve());
      }
    } finally {
      this.state.inFlight = false;
      this.render();
    }
  }

  private fail(err: unknown, action: () => Promise<void>): void {
    const message =
      err instanceof ApiError ? err.message : "Annotation service unreachable.";
    this.state.banner = message;
    this.lastFailedAction = action;
  }

  private async retry(): Promise<void> {
    this.state.banner = null;
    const action = this.lastFailedAction;
    this.lastFailedAction = null;
    this.render();
    if (action) await action();
  }

  render(): void {
    // banner
    this.banner.classList.toggle("hidden", this.state.banner === null);
    this.bannerText.textContent = this.state.banner ?? "";

    // sections
    const haveSession = this.state.info !== null;
    this.workspace.classList.toggle("hidden", !haveSession);

    // grid overlay
    renderGrid(this.gridContainer, this.state, {
      onSelect: (row, col) => this.selectPatch(row, col),
    });

    // patch editor
    const selected = this.state.selected;
    this.editorTitle.textContent = selected
      ? `Patch (${selected.row}, ${selected.col})`
      : "Select a patch";
    this.sizeInput.disabled = !selected;
    this.extentInput.disabled = !selected;

    // sliders
    this.lambdaValue.textContent = formatValue(this.lambda);
    this.betaValue.textContent = formatValue(this.beta);

    // solve affordance
    this.solveButton.disabled =
      this.state.inFlight || !haveSession || labeledEntries(this.state).length === 0;
    this.solveButton.textContent = this.state.inFlight ? "Solving..." : "Solve";

    // inline errors
    this.fieldError.classList.toggle("hidden", this.state.fieldError === null);
    this.fieldError.textContent = this.state.fieldError ?? "";

    // preview pane
    const haveSolve = this.state.solve !== null;
    this.preview.classList.toggle("hidden", !haveSolve);
    this.previewEmpty.classList.toggle("hidden", haveSolve);
    this.staleBadge.classList.toggle("hidden", !previewIsStale(this.state));
    if (this.state.solve) {
      const s = this.state.solve;
      this.solveStats.textContent =
        `unary ${s.unary_energy.toExponential(3)} | ` +
        `binary ${s.binary_energy.toExponential(3)} | ` +
        `residual ${s.residual.toExponential(2)} | ` +
        `${s.iterations} iterations | lambda ${formatValue(s.lambda)} beta ${formatValue(s.beta)}`;
    } else {
      this.solveStats.textContent = "";
    }
  }
}

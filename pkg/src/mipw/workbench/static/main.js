/** Application wiring: queue navigation, draft editing with enforced
 * dependencies, submission with auto-advance, offline fallback, and the
 * conflict view. */
import { ApiClient, ApiError, NetworkError } from "./api.js";
import { actionForKey, isTypingTarget } from "./keyboard.js";
import { filterQueue, isComplete, nextIncomplete, orderItems, progressLabel } from "./queue.js";
import { DraftState, DraftStore } from "./state.js";
import { buildControls, renderConflict, renderFieldErrors, renderMeta, renderRawResponse, renderSentence, syncControls, } from "./view.js";
export class App {
    constructor(root, api, storage, annotator) {
        this.root = root;
        this.api = api;
        this.items = [];
        this.conflicts = [];
        this.currentId = null;
        this.statusFilter = "all";
        this.offline = false;
        this.draft = new DraftState();
        this.drafts = new DraftStore(storage);
        this.annotator =
            annotator ?? storage.getItem("mipw-annotator") ?? "annotator";
        storage.setItem("mipw-annotator", this.annotator);
        this.controls = buildControls();
        this.controls.root.addEventListener("submit", () => void this.submit());
        for (const [category, box] of Object.entries(this.controls.checkboxes)) {
            box.addEventListener("change", () => {
                // the change already happened in the DOM; drive it from state instead
                box.checked = !box.checked;
                this.toggle(category);
            });
        }
        this.controls.note.addEventListener("input", () => {
            this.draft.note = this.controls.note.value;
            this.persistDraft();
        });
        this.keyHandler = (event) => this.onKey(event);
        document.addEventListener("keydown", this.keyHandler);
    }
    destroy() {
        document.removeEventListener("keydown", this.keyHandler);
    }
    async load() {
        try {
            this.items = orderItems(await this.api.listItems());
            this.conflicts = await this.api.conflicts();
            this.offline = false;
        }
        catch (err) {
            if (err instanceof NetworkError) {
                // keep whatever queue we already have, read-only
                this.offline = true;
            }
            else {
                throw err;
            }
        }
        if (this.currentId === null && this.items.length > 0) {
            const next = nextIncomplete(this.items, this.annotator, null);
            this.currentId = (next ?? this.items[0]).id;
        }
        this.restoreDraft();
        this.render();
    }
    current() {
        return this.items.find((item) => item.id === this.currentId) ?? null;
    }
    toggle(category) {
        if (this.draft.toggle(category)) {
            this.persistDraft();
            syncControls(this.controls, this.draft);
        }
    }
    goto(id) {
        this.currentId = id;
        this.restoreDraft();
        this.render();
    }
    move(step) {
        const queue = filterQueue(this.items, this.annotator, this.statusFilter);
        if (queue.length === 0)
            return;
        const at = Math.max(0, queue.findIndex((item) => item.id === this.currentId));
        const next = queue[(at + step + queue.length) % queue.length];
        this.goto(next.id);
    }
    setFilter(filter) {
        this.statusFilter = filter;
        const queue = filterQueue(this.items, this.annotator, filter);
        if (queue.length > 0 && !queue.some((item) => item.id === this.currentId)) {
            this.goto(queue[0].id);
            return;
        }
        this.render();
    }
    async submit() {
        const item = this.current();
        if (item === null || this.offline)
            return;
        const payload = this.draft.toPayload(this.annotator);
        try {
            await this.api.submitRecord(item.id, payload);
        }
        catch (err) {
            if (err instanceof ApiError && err.status === 422) {
                renderFieldErrors(this.controls, err.fieldErrors);
                return; // draft stays intact for correction
            }
            if (err instanceof NetworkError) {
                this.offline = true;
                this.persistDraft(); // retained locally until retried
                this.render();
                return;
            }
            throw err;
        }
        renderFieldErrors(this.controls, []);
        this.drafts.clear(item.id);
        this.draft.reset();
        await this.refreshItems();
        const next = nextIncomplete(this.items, this.annotator, item.id);
        this.currentId = next === null ? item.id : next.id;
        this.restoreDraft();
        this.render();
    }
    async refreshItems() {
        try {
            this.items = orderItems(await this.api.listItems());
            this.conflicts = await this.api.conflicts();
            this.offline = false;
        }
        catch {
            this.offline = true;
        }
    }
    onKey(event) {
        const action = actionForKey(event.key, {
            typing: isTypingTarget(event.target),
            ctrl: event.ctrlKey,
        });
        if (action === null)
            return;
        event.preventDefault();
        if (action.kind === "toggle")
            this.toggle(action.category);
        else if (action.kind === "submit")
            void this.submit();
        else if (action.kind === "next")
            this.move(1);
        else
            this.move(-1);
    }
    persistDraft() {
        if (this.currentId !== null) {
            this.drafts.save(this.currentId, this.draft);
        }
    }
    restoreDraft() {
        this.draft = this.currentId === null ? new DraftState() : this.drafts.load(this.currentId);
    }
    render() {
        this.root.replaceChildren();
        const header = document.createElement("header");
        const progress = document.createElement("span");
        progress.id = "progress";
        progress.textContent = progressLabel(this.items, this.annotator);
        const who = document.createElement("span");
        who.id = "annotator";
        who.textContent = this.annotator;
        header.append(who, progress);
        const filter = document.createElement("select");
        filter.id = "status-filter";
        for (const value of ["all", "incomplete", "complete"]) {
            const option = document.createElement("option");
            option.value = value;
            option.textContent = value;
            option.selected = value === this.statusFilter;
            filter.append(option);
        }
        filter.addEventListener("change", () => this.setFilter(filter.value));
        header.append(filter);
        if (this.offline) {
            const banner = document.createElement("div");
            banner.id = "offline-banner";
            banner.textContent = "service unreachable; queue shown read-only, drafts kept locally";
            header.append(banner);
        }
        this.root.append(header);
        const queue = filterQueue(this.items, this.annotator, this.statusFilter);
        const list = document.createElement("ul");
        list.id = "queue";
        for (const item of queue) {
            const entry = document.createElement("li");
            entry.dataset.id = item.id;
            entry.textContent = `${item.id}${isComplete(item, this.annotator) ? " ✓" : ""}`;
            if (item.id === this.currentId)
                entry.classList.add("current");
            entry.addEventListener("click", () => this.goto(item.id));
            list.append(entry);
        }
        this.root.append(list);
        const item = this.current();
        const pane = document.createElement("main");
        pane.id = "item-pane";
        if (item === null) {
            pane.textContent = "no items";
        }
        else {
            pane.append(renderSentence(item), renderMeta(item), renderRawResponse(item));
            syncControls(this.controls, this.draft);
            pane.append(this.controls.root);
            const conflict = this.conflicts.find((c) => c.sentence_id === item.id);
            if (conflict) {
                pane.append(renderConflict(conflict));
            }
        }
        this.root.append(pane);
    }
}
export function bootstrap() {
    const root = document.getElementById("app");
    if (root === null)
        return;
    const name = window.localStorage.getItem("mipw-annotator") ??
        window.prompt("annotator id?", "annotator") ??
        "annotator";
    window.localStorage.setItem("mipw-annotator", name);
    const app = new App(root, new ApiClient(), window.localStorage, name);
    void app.load();
}
if (typeof document !== "undefined" && document.getElementById("app") !== null) {
    bootstrap();
}

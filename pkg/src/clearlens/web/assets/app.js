// Landing-page enhancement for the clearlens service.
//
// The landing form is a plain GET form to /render and fully works with
// scripting disabled; this script only adds inline validation, a live
// label for the text-size slider, and canonical URL building.
export const SCALE_MIN = 0.75;
export const SCALE_MAX = 2.0;
export function clampScale(value) {
    if (Number.isNaN(value)) {
        return 1;
    }
    return Math.min(SCALE_MAX, Math.max(SCALE_MIN, value));
}
function formatScale(value) {
    // 1 -> "1", 1.5 -> "1.5"; never exponent notation in this range
    return String(Math.round(value * 100) / 100);
}
/**
 * Build the /render URL for the current form state.
 *
 * Scheme-less input is passed through untouched (the server defaults it);
 * everything is carried in the query string so the choice survives into
 * the rewritten links of the transformed page.
 */
export function buildRenderUrl(state) {
    const url = state.urlInput.trim();
    if (url === "") {
        throw new Error("Enter a web address first.");
    }
    const parts = [
        `url=${encodeURIComponent(url)}`,
        `preset=${encodeURIComponent(state.preset)}`,
        `scale=${formatScale(clampScale(state.scale))}`,
    ];
    return `/render?${parts.join("&")}`;
}
function findElements(doc) {
    const form = doc.getElementById("render-form");
    const urlField = doc.getElementById("url-input");
    const presetField = doc.getElementById("preset-select");
    const scaleField = doc.getElementById("scale-input");
    if (!(form instanceof HTMLFormElement) ||
        !(urlField instanceof HTMLInputElement) ||
        !(presetField instanceof HTMLSelectElement) ||
        !(scaleField instanceof HTMLInputElement)) {
        return null;
    }
    return {
        form,
        urlField,
        presetField,
        scaleField,
        scaleLabel: doc.getElementById("scale-value"),
        errorBox: doc.getElementById("form-error"),
    };
}
export function readState(els) {
    return {
        urlInput: els.urlField.value,
        preset: els.presetField.value,
        scale: Number(els.scaleField.value),
    };
}
export function enhance(doc) {
    const els = findElements(doc);
    if (els === null) {
        return;
    }
    const { form, scaleField, scaleLabel, errorBox } = els;
    scaleField.addEventListener("input", () => {
        if (scaleLabel !== null) {
            scaleLabel.textContent = formatScale(clampScale(Number(scaleField.value)));
        }
    });
    // Enter in the URL field triggers the same submit event as the button.
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        let target;
        try {
            target = buildRenderUrl(readState(els));
        }
        catch (err) {
            if (errorBox !== null) {
                errorBox.textContent = err instanceof Error ? err.message : String(err);
            }
            els.urlField.focus();
            return;
        }
        if (errorBox !== null) {
            errorBox.textContent = "";
        }
        // full-page navigation so every later click flows through /render
        window.location.assign(target);
    });
}
if (typeof document !== "undefined") {
    if (document.readyState === "loading") {
        document.addEventListener("DOMContentLoaded", () => enhance(document));
    }
    else {
        enhance(document);
    }
}

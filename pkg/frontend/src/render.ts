/** Formula display: KaTeX when the CDN bundle loaded, plain text otherwise.
 *
 * Rendering is display-only; the raw LaTeX string is what gets judged and
 * submitted, never the rendered form.
 */

interface KatexLike {
  render(tex: string, el: HTMLElement, opts?: { throwOnError?: boolean; displayMode?: boolean }): void;
}

function katexBundle(): KatexLike | null {
  const k = (globalThis as { katex?: KatexLike }).katex;
  return k ?? null;
}

export type RenderMode = "katex" | "plain";

export function renderFormula(el: HTMLElement, latex: string): RenderMode {
  const katex = katexBundle();
  if (katex) {
    try {
      katex.render(latex, el, { throwOnError: true, displayMode: true });
      return "katex";
    } catch {
      // fall through to the plain-text fallback
    }
  }
  el.textContent = latex;
  el.classList.add("plain-math");
  return "plain";
}

/** Transient notification strip; server rejections surface here by kind. */
import { htmlEl } from "./dom.js";

const MAX_VISIBLE = 4;
const LIFETIME_MS = 4000;

export function showToast(container: HTMLElement, kind: string, message: string): void {
  const toast = htmlEl(
    "div",
    { class: "toast", "data-kind": kind },
    `${kind}: ${message}`,
  );
  container.appendChild(toast);
  while (container.children.length > MAX_VISIBLE) {
    container.removeChild(container.firstChild as Element);
  }
  setTimeout(() => {
    if (toast.parentNode === container) container.removeChild(toast);
  }, LIFETIME_MS);
}

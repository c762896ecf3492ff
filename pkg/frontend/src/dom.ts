/** Tiny DOM builders so views stay framework-free. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function formatMoney(money: { amount_minor: number; currency: string }): string {
  const sign = money.amount_minor < 0 ? "-" : "";
  const abs = Math.abs(money.amount_minor);
  const units = Math.floor(abs / 100);
  const cents = String(abs % 100).padStart(2, "0");
  return `${money.currency} ${sign}${units}.${cents}`;
}

export function todayIso(): string {
  return new Date().toISOString().slice(0, 10);
}

/** Display formatting. The console never does arithmetic on solver
 * results beyond formatting them. */

export function fmt3(value: number): string {
  return value.toFixed(3);
}

/** CSS percentage width for a membership bar (memberships live in
 * [0, 1]; clamp only guards against float dust). */
export function barWidth(mu: number): string {
  const pct = Math.min(1, Math.max(0, mu)) * 100;
  return `${pct.toFixed(1)}%`;
}

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

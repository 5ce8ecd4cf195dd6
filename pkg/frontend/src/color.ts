/**
 * Colour rules shared with the server's DOT export: edges use a
 * diverging red-black-green scale over the balance of the two ranges,
 * nodes use saturation for the larger of their two values.
 */

export function edgeBalance(wLeft: number, wRight: number): number {
  const total = wLeft + wRight;
  if (total === 0) return 0;
  return (wRight - wLeft) / total;
}

function channel(value: number): string {
  return Math.round(255 * value)
    .toString(16)
    .padStart(2, "0");
}

/** Map [-1, 1] to red (#ff0000) .. black (#000000) .. green (#00ff00). */
export function divergingColor(balance: number): string {
  const v = Math.max(-1, Math.min(1, balance));
  if (v < 0) return `#${channel(-v)}0000`;
  return `#00${channel(v)}00`;
}

export function annotationColor(wLeft: number, wRight: number): string {
  return divergingColor(edgeBalance(wLeft, wRight));
}

/**
 * Node fill: saturation scales with value / maxValue. Zero-valued
 * nodes get the minimum saturation (an almost-white fill).
 */
export function nodeFill(value: number, maxValue: number): string {
  const ratio = maxValue > 0 ? Math.max(0, Math.min(1, value / maxValue)) : 0;
  const saturation = 0.08 + 0.92 * ratio;
  const light = Math.round(255 * (1 - saturation));
  const hex = light.toString(16).padStart(2, "0");
  return `#${hex}${hex}ff`;
}

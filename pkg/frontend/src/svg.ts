/** Tiny SVG document builder with fixed-precision coordinates.
 *
 * All numbers are rounded to two decimals before serialization so a figure
 * rendered twice from the same data is byte-identical.
 */

export function fmt(x: number): string {
  const rounded = Math.round(x * 100) / 100;
  // normalize negative zero so output is stable
  return (Object.is(rounded, -0) ? 0 : rounded).toString();
}

export type Attrs = Record<string, string | number>;

function attrString(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join("");
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  element(tag: string, attrs: Attrs, text?: string): void {
    if (text === undefined) {
      this.parts.push(`<${tag}${attrString(attrs)}/>`);
    } else {
      this.parts.push(`<${tag}${attrString(attrs)}>${escapeText(text)}</${tag}>`);
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): void {
    this.element("line", { x1, y1, x2, y2, ...attrs });
  }

  polyline(points: Array<[number, number]>, attrs: Attrs = {}): void {
    const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.element("polyline", { points: joined, fill: "none", ...attrs });
  }

  circle(cx: number, cy: number, r: number, attrs: Attrs = {}): void {
    this.element("circle", { cx, cy, r, ...attrs });
  }

  text(x: number, y: number, content: string, attrs: Attrs = {}): void {
    this.element(
      "text",
      { x, y, "font-family": "sans-serif", "font-size": 11, ...attrs },
      content,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
        `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

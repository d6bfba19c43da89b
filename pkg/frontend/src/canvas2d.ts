/**
 * The slice of CanvasRenderingContext2D the renderer actually uses, plus a
 * deterministic software implementation of it for golden-frame tests.
 * A real 2D context satisfies Canvas2DLike structurally, so the same render
 * code drives the browser and the test rasterizer.
 */

export interface Canvas2DLike {
  fillStyle: string;
  strokeStyle: string;
  lineWidth: number;
  globalAlpha: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
}

type Rgb = [number, number, number];

function hslToRgb(h: number, s: number, l: number): Rgb {
  const hue = ((h % 360) + 360) % 360;
  const c = (1 - Math.abs(2 * l - 1)) * s;
  const x = c * (1 - Math.abs(((hue / 60) % 2) - 1));
  const m = l - c / 2;
  let rgb: Rgb;
  if (hue < 60) rgb = [c, x, 0];
  else if (hue < 120) rgb = [x, c, 0];
  else if (hue < 180) rgb = [0, c, x];
  else if (hue < 240) rgb = [0, x, c];
  else if (hue < 300) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  return [
    Math.round((rgb[0] + m) * 255),
    Math.round((rgb[1] + m) * 255),
    Math.round((rgb[2] + m) * 255),
  ];
}

/** Parse the color formats the renderer emits: #rgb/#rrggbb, rgb(), hsl(). */
export function parseColor(color: string): Rgb {
  const text = color.trim().toLowerCase();
  if (text.startsWith("#")) {
    const hex = text.slice(1);
    if (hex.length === 3) {
      return [
        parseInt(hex[0] + hex[0], 16),
        parseInt(hex[1] + hex[1], 16),
        parseInt(hex[2] + hex[2], 16),
      ];
    }
    return [
      parseInt(hex.slice(0, 2), 16),
      parseInt(hex.slice(2, 4), 16),
      parseInt(hex.slice(4, 6), 16),
    ];
  }
  const fn = text.match(/^(rgb|hsl)\(([^)]*)\)$/);
  if (fn) {
    const parts = fn[2].split(",").map((p) => parseFloat(p));
    if (fn[1] === "rgb") {
      return [Math.round(parts[0]), Math.round(parts[1]), Math.round(parts[2])];
    }
    const sRaw = fn[2].split(",")[1].trim();
    const lRaw = fn[2].split(",")[2].trim();
    return hslToRgb(
      parts[0],
      parseFloat(sRaw) / (sRaw.endsWith("%") ? 100 : 1),
      parseFloat(lRaw) / (lRaw.endsWith("%") ? 100 : 1),
    );
  }
  if (text === "white") return [255, 255, 255];
  if (text === "black") return [0, 0, 0];
  throw new Error(`unsupported color: ${color}`);
}

/**
 * Integer-space RGBA rasterizer. Rectangles are clipped, rounded to pixel
 * edges, and alpha-blended with the current globalAlpha, so identical draw
 * sequences produce identical buffers on any platform.
 */
export class SoftwareCanvas implements Canvas2DLike {
  fillStyle = "#000000";
  strokeStyle = "#000000";
  lineWidth = 1;
  globalAlpha = 1;

  readonly pixels: Uint8ClampedArray;

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.pixels = new Uint8ClampedArray(width * height * 4);
  }

  private paintRect(x: number, y: number, w: number, h: number, color: string): void {
    if (w <= 0 || h <= 0 || this.globalAlpha <= 0) return;
    const [r, g, b] = parseColor(color);
    const x0 = Math.max(0, Math.round(x));
    const y0 = Math.max(0, Math.round(y));
    const x1 = Math.min(this.width, Math.round(x + w));
    const y1 = Math.min(this.height, Math.round(y + h));
    if (x1 <= x0 || y1 <= y0) return;
    const pixels = this.pixels;
    const alpha = this.globalAlpha;
    if (alpha >= 1) {
      for (let py = y0; py < y1; py++) {
        let i = (py * this.width + x0) * 4;
        for (let px = x0; px < x1; px++) {
          pixels[i] = r;
          pixels[i + 1] = g;
          pixels[i + 2] = b;
          pixels[i + 3] = 255;
          i += 4;
        }
      }
      return;
    }
    const inv = 1 - alpha;
    const a255 = alpha * 255;
    for (let py = y0; py < y1; py++) {
      let i = (py * this.width + x0) * 4;
      for (let px = x0; px < x1; px++) {
        pixels[i] = Math.round(r * alpha + pixels[i] * inv);
        pixels[i + 1] = Math.round(g * alpha + pixels[i + 1] * inv);
        pixels[i + 2] = Math.round(b * alpha + pixels[i + 2] * inv);
        pixels[i + 3] = Math.min(255, Math.round(a255 + pixels[i + 3] * inv));
        i += 4;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number): void {
    this.paintRect(x, y, w, h, this.fillStyle);
  }

  strokeRect(x: number, y: number, w: number, h: number): void {
    const lw = Math.max(1, Math.round(this.lineWidth));
    this.paintRect(x - lw / 2, y - lw / 2, w + lw, lw, this.strokeStyle);
    this.paintRect(x - lw / 2, y + h - lw / 2, w + lw, lw, this.strokeStyle);
    this.paintRect(x - lw / 2, y + lw / 2, lw, h - lw, this.strokeStyle);
    this.paintRect(x + w - lw / 2, y + lw / 2, lw, h - lw, this.strokeStyle);
  }

  clearRect(x: number, y: number, w: number, h: number): void {
    const x0 = Math.max(0, Math.round(x));
    const y0 = Math.max(0, Math.round(y));
    const x1 = Math.min(this.width, Math.round(x + w));
    const y1 = Math.min(this.height, Math.round(y + h));
    for (let py = y0; py < y1; py++) {
      for (let px = x0; px < x1; px++) {
        const i = (py * this.width + px) * 4;
        this.pixels[i] = this.pixels[i + 1] = this.pixels[i + 2] = this.pixels[i + 3] = 0;
      }
    }
  }

  /** Two 32-bit FNV-1a passes over the RGBA buffer, as a 16-hex fingerprint. */
  frameHash(): string {
    let h1 = 0x811c9dc5;
    let h2 = 0x01000193;
    const pixels = this.pixels;
    for (let i = 0; i < pixels.length; i++) {
      h1 = Math.imul(h1 ^ pixels[i], 16777619) >>> 0;
      h2 = Math.imul(h2 ^ pixels[i], 0x85ebca6b) >>> 0;
    }
    return (
      h1.toString(16).padStart(8, "0") + h2.toString(16).padStart(8, "0")
    );
  }
}

// Sandboxed sketch preview. The sketch runs inside an isolated iframe built
// from srcdoc (allow-scripts only: no credentials, no access back into the
// app or the engine). Runtime errors surface through postMessage so the
// host can show an error strip without the frame breaking out.

const P5_CDN = 'https://cdn.jsdelivr.net/npm/p5@1.9.4/lib/p5.min.js';

export function previewSrcdoc(code: string): string {
  return `<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<style>html,body{margin:0;padding:0;overflow:hidden;background:#111;display:flex;justify-content:center}</style>
<script>
window.onerror = function (message) {
  parent.postMessage({ kind: 'sketch-error', message: String(message) }, '*');
  return true;
};
</script>
<script src="${P5_CDN}"></script>
</head>
<body>
<script>
${code}
</script>
</body>
</html>`;
}

export interface PreviewHost {
  run(code: string): void;
  stop(): void;
  onError(handler: (message: string) => void): void;
}

export function createPreviewHost(container: HTMLElement): PreviewHost {
  let frame: HTMLIFrameElement | null = null;
  let errorHandler: ((message: string) => void) | null = null;

  window.addEventListener('message', (event) => {
    if (event.data && event.data.kind === 'sketch-error' && errorHandler) {
      errorHandler(event.data.message);
    }
  });

  return {
    run(code: string): void {
      this.stop();
      frame = document.createElement('iframe');
      frame.setAttribute('sandbox', 'allow-scripts');
      frame.className = 'preview-frame';
      frame.srcdoc = previewSrcdoc(code);
      container.appendChild(frame);
    },
    stop(): void {
      if (frame) {
        frame.remove();
        frame = null;
      }
    },
    onError(handler: (message: string) => void): void {
      errorHandler = handler;
    },
  };
}

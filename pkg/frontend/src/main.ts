// Bootstrap: wire the store to the three panels.
//
// The API base defaults to the same origin (when served by the engine's
// --static-dir mount) and can be overridden with ?api=http://host:port.

import { ApiClient } from './api.js';
import { createPreviewHost } from './preview.js';
import {
  renderGraph,
  renderSparkMenu,
  renderStatus,
  renderToolbar,
  renderTranscript,
} from './render.js';
import { SessionStore } from './state.js';
import type { Mode } from './types.js';

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get('api');
  if (override) return override.replace(/\/$/, '');
  return window.location.origin;
}

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

async function boot(): Promise<void> {
  const store = new SessionStore(new ApiClient(apiBase()));

  const transcript = byId<HTMLDivElement>('transcript');
  const graphPanel = byId<HTMLDivElement>('graph');
  const sparkMenu = byId<HTMLDivElement>('spark-menu');
  const status = byId<HTMLDivElement>('status');
  const editor = byId<HTMLTextAreaElement>('editor');
  const previewPane = byId<HTMLDivElement>('preview');
  const errorStrip = byId<HTMLDivElement>('preview-error');
  const promptInput = byId<HTMLInputElement>('prompt');
  const modeSelect = byId<HTMLSelectElement>('mode');

  const buttons = {
    send: byId<HTMLButtonElement>('send'),
    collect: byId<HTMLButtonElement>('collect'),
    modify: byId<HTMLButtonElement>('modify'),
    merge: byId<HTMLButtonElement>('merge'),
    spark: byId<HTMLButtonElement>('spark'),
    duplicate: byId<HTMLButtonElement>('duplicate'),
    remove: byId<HTMLButtonElement>('delete'),
    run: byId<HTMLButtonElement>('run-preview'),
    stop: byId<HTMLButtonElement>('stop-preview'),
  };

  const preview = createPreviewHost(previewPane);
  preview.onError((message) => {
    errorStrip.textContent = `sketch error: ${message}`;
    errorStrip.classList.remove('hidden');
  });

  store.subscribe((state) => {
    renderTranscript(transcript, state);
    renderGraph(graphPanel, state);
    renderSparkMenu(sparkMenu, state);
    renderStatus(status, state);
    renderToolbar(buttons, state, {
      modify: store.canModify(),
      merge: store.canMerge(),
      send: store.canSend(),
    });
    if (document.activeElement !== editor) {
      editor.value = state.editorCode;
    }
  });

  // Dialogue panel
  modeSelect.addEventListener('change', () => store.setMode(modeSelect.value as Mode));
  buttons.send.addEventListener('click', async () => {
    const prompt = promptInput.value.trim();
    if (!prompt) return;
    promptInput.value = '';
    await store.sendTurn(prompt);
  });
  promptInput.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') buttons.send.click();
  });
  transcript.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains('copy-code') && target.dataset.code) {
      store.setEditorCode(target.dataset.code);
    }
  });

  // Flow panel
  graphPanel.addEventListener('click', async (event) => {
    const group = (event.target as Element).closest('[data-node-id]');
    if (!group) return;
    const nodeId = (group as SVGGElement).dataset.nodeId!;
    if ((event as MouseEvent).shiftKey) {
      store.toggleSelect(nodeId);
    } else {
      await store.clickNode(nodeId);
    }
  });
  buttons.modify.addEventListener('click', async () => {
    const instruction = window.prompt('Modify instruction:') ?? '';
    if (instruction) await store.modifySelected(instruction);
  });
  buttons.merge.addEventListener('click', async () => {
    const instruction = window.prompt('Fusion instruction:') ?? '';
    if (instruction) await store.mergeSelected(instruction);
  });
  buttons.spark.addEventListener('click', () => {
    if (store.canModify()) store.openSparkMenu(store.state.selected[0]);
  });
  sparkMenu.addEventListener('click', async (event) => {
    const target = event.target as HTMLElement;
    const option = target.closest('.spark-option') as HTMLElement | null;
    if (option && option.dataset.sparkId) {
      await store.applySpark(option.dataset.sparkId);
    } else if (target.classList.contains('spark-cancel')) {
      store.closeSparkMenu();
    }
  });
  buttons.duplicate.addEventListener('click', () => store.duplicateSelected());
  buttons.remove.addEventListener('click', () => {
    const recursive = window.confirm('Delete the whole subtree? (Cancel = this node only)');
    void store.deleteSelected(recursive);
  });

  // Editor / preview panel
  editor.addEventListener('input', () => store.setEditorCode(editor.value));
  buttons.run.addEventListener('click', () => {
    errorStrip.classList.add('hidden');
    preview.run(store.state.editorCode);
  });
  buttons.stop.addEventListener('click', () => preview.stop());
  buttons.collect.addEventListener('click', async () => {
    const title = window.prompt('Title for this version:') ?? '';
    await store.collectEditor(title || 'untitled');
  });

  await store.init();
}

boot().catch((error) => {
  const status = document.getElementById('status');
  if (status) {
    status.textContent = `failed to reach the session service: ${error}`;
    status.classList.add('error');
  }
});

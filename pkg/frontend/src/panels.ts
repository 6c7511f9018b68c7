/**
 * Result panel rendering. Panels appear in exactly the order the server
 * returned them (rank order); nothing here re-sorts. All snippet-derived
 * text goes through textContent, so markup in code cannot inject.
 */

import type { ResultPanelModel, SearchResultDto } from "./types.js";

export function toPanelModel(dto: SearchResultDto): ResultPanelModel {
  return {
    rank: dto.rank,
    qualifiedName: dto.qualified_name,
    relativePath: dto.relative_path,
    span: dto.span,
    code: dto.raw_text,
    similarity: dto.best_similarity,
    streamBadges: dto.streams,
  };
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderPanel(doc: Document, model: ResultPanelModel): HTMLElement {
  const panel = el(doc, "article", "panel");
  panel.dataset.rank = String(model.rank);

  const header = el(doc, "header", "panel-header");
  header.appendChild(el(doc, "span", "panel-rank", `#${model.rank}`));
  header.appendChild(el(doc, "span", "panel-name", model.qualifiedName));
  header.appendChild(
    el(
      doc,
      "span",
      "panel-location",
      `${model.relativePath}:${model.span[0]}-${model.span[1]}`,
    ),
  );
  header.appendChild(
    el(doc, "span", "panel-similarity", model.similarity.toFixed(3)),
  );
  panel.appendChild(header);

  const badges = el(doc, "div", "panel-badges");
  for (const stream of model.streamBadges) {
    badges.appendChild(el(doc, "span", "badge", stream));
  }
  panel.appendChild(badges);

  const pre = el(doc, "pre", "panel-code");
  const code = doc.createElement("code");
  code.textContent = model.code;
  pre.appendChild(code);
  panel.appendChild(pre);

  return panel;
}

/** Replace the container's contents with one panel per result, in order. */
export function renderPanels(
  container: HTMLElement,
  results: SearchResultDto[],
): ResultPanelModel[] {
  const doc = container.ownerDocument;
  container.textContent = "";
  const models = results.map(toPanelModel);
  for (const model of models) {
    container.appendChild(renderPanel(doc, model));
  }
  return models;
}

import init, { fixture_registry, radarSvg, calculate, drapePreview } from "./pkg/clothbench_web.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  try {
    out.textContent = f();
    out.classList.remove("err");
  } catch (e) {
    out.textContent = e.message ?? String(e);
    out.classList.add("err");
  }
}

function setupRadar(registry) {
  const ids = Object.keys(JSON.parse(registry).sets);
  const box = $("sets");
  for (const id of ids) {
    const label = document.createElement("label");
    label.innerHTML = `<input type="checkbox" value="${id}" checked> ${id}`;
    box.appendChild(label);
  }
  const redraw = () => {
    const chosen = [...box.querySelectorAll("input:checked")].map((c) => c.value);
    try {
      $("radar").innerHTML = chosen.length ? radarSvg(registry, chosen.join(",")) : "";
    } catch (e) {
      $("radar").textContent = e.message;
    }
  };
  box.addEventListener("change", redraw);
  redraw();
}

function setupCalculators() {
  const num = (id) => parseFloat($(id).value);
  const pct = (v) => `${(v * 100).toFixed(1)} %`;
  const update = () => {
    show($("s-out"), () => pct(calculate("stiffness", num("s-a1"), num("s-a2"), num("s-a3"))));
    show($("e-out"), () => pct(calculate("elasticity", num("e-li"), num("e-lf"), 0)));
    show($("f-out"), () => `μ = ${calculate("friction", num("f-h"), num("f-l"), 0).toFixed(4)}`);
  };
  document.querySelectorAll("input[type=number]").forEach((i) => i.addEventListener("input", update));
  update();
}

function setupDrape() {
  $("d-run").addEventListener("click", () => {
    $("d-out").textContent = "running...";
    // Let the label paint before the simulation blocks the thread.
    setTimeout(() => {
      try {
        const r = JSON.parse(drapePreview(parseFloat($("d-kb").value), parseInt($("d-n").value, 10)));
        $("d-out").textContent = `stiffness ${(r.stiffness * 100).toFixed(1)} %`;
        $("drape").innerHTML = r.svg;
      } catch (e) {
        $("d-out").textContent = e.message;
      }
    }, 20);
  });
}

await init();
setupRadar(fixture_registry());
setupCalculators();
setupDrape();

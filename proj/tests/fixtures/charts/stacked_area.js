const margin = { top: 20, right: 30, bottom: 30, left: 50 };
const keys = ["Lagging_Reactive_kVarh", "Leading_Reactive_kVarh"];
const daily = d3.rollups(data, v => ({
  Lagging_Reactive_kVarh: d3.sum(v, d => d.Lagging_Reactive_kVarh),
  Leading_Reactive_kVarh: d3.sum(v, d => d.Leading_Reactive_kVarh)
}), d => d.Date.slice(0, 10)).map(([day, sums]) => Object.assign({ day: new Date(day) }, sums));

const stack = d3.stack().keys(keys);
const layers = stack(daily);
const xScale = d3.scaleTime().domain(d3.extent(daily, d => d.day)).range([margin.left, vw - margin.right]);
const yScale = d3.scaleLinear().domain([0, d3.max(layers[layers.length - 1], d => d[1])]).nice()
  .range([vh - margin.bottom, margin.top]);
const color = d3.scaleOrdinal().domain(keys).range(["#fd8d3c", "#6baed6"]);
const area = d3.area().x(d => xScale(d.data.day)).y0(d => yScale(d[0])).y1(d => yScale(d[1]));

svg.selectAll("path.layer")
  .data(layers)
  .enter().append("path")
  .attr("class", "layer")
  .attr("fill", d => color(d.key))
  .attr("d", area);

svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
return { xScale, yScale };

// two stacked subplots sharing the time scale: reactive power above, load status below
const margin = { top: 20, right: 20, bottom: 30, left: 60 };
const splitY = vh * 0.7;
const hours = d3.rollups(data, v => ({
  lagging: d3.mean(v, d => d.Lagging_Reactive_kVarh),
  usage: d3.sum(v, d => d.Usage_kWh),
  load: d3.greatest(v, d => d.Usage_kWh).Load_Type
}), d => d.Date.slice(0, 13)).map(([hour, agg]) => Object.assign({ hour: new Date(hour + ":00") }, agg))
  .filter(h => h.usage >= 10);

const xScale = d3.scaleTime().domain(d3.extent(hours, h => h.hour)).range([margin.left, vw - margin.right]);
const yScale = d3.scaleLinear().domain([0, d3.max(hours, h => h.lagging)]).nice().range([splitY - 20, margin.top]);
const loadScale = d3.scalePoint().domain(["Light_Load", "Medium_Load", "Maximum_Load"]).range([vh - margin.bottom, splitY + 10]);

svg.selectAll("circle.power")
  .data(hours)
  .enter()
  .append("circle")
  .attr("class", "power")
  .attr("cx", h => xScale(h.hour))
  .attr("cy", h => yScale(h.lagging))
  .attr("r", 2);

svg.selectAll("rect.load")
  .data(hours)
  .enter()
  .append("rect")
  .attr("class", "load")
  .attr("x", h => xScale(h.hour))
  .attr("y", h => loadScale(h.load) - 3)
  .attr("width", 3)
  .attr("height", 6)
  .attr("fill", "#756bb1");

svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(loadScale));
return { xScale, yScale };
